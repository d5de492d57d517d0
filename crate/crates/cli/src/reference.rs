//! Published Euler characteristics used by `verify`.

/// `χ(M̄_n)` for `n = 2..=19`.
pub const EULER_MBAR: [&str; 18] = [
    "1",
    "2",
    "10",
    "84",
    "1108",
    "20824",
    "530528",
    "17578464",
    "734772384",
    "37814132256",
    "2349344349504",
    "173367352211520",
    "14989230432337536",
    "1500796146336385152",
    "172277450643084049920",
    "22474724472542045216256",
    "3306538057482623252067840",
    "544879611875655894561850368",
];

/// `χ(M̄_{0,n+1})` for `n = 2..=19`.
pub const EULER_MBAR0: [&str; 18] = [
    "1",
    "2",
    "7",
    "34",
    "213",
    "1630",
    "14747",
    "153946",
    "1821473",
    "24087590",
    "352080111",
    "5636451794",
    "98081813581",
    "1843315388078",
    "37209072076483",
    "802906142007946",
    "18443166021077145",
    "449326835001457846",
];
