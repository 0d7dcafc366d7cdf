//! Duncan's significant studentized ranges at alpha = 0.05.
//!
//! Each entry is the studentized-range quantile at protection level
//! `(1 - alpha)^(p - 1)`, made nondecreasing in `p` as in Duncan's tables.

/// Degrees of freedom covered by [`DUNCAN_05`]; `f64::INFINITY` is the last row.
pub const DF_ROWS: [f64; 34] = [
    1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0, 17.0, 18.0, 19.0, 20.0, 21.0, 22.0, 23.0, 24.0, 25.0, 26.0, 27.0, 28.0, 29.0, 30.0, 40.0, 60.0, 120.0, f64::INFINITY,
];

/// Smallest and largest number of means spanned.
pub const P_MIN: usize = 2;
pub const P_MAX: usize = 10;

/// `DUNCAN_05[row][p - 2]`.
#[rustfmt::skip]
pub const DUNCAN_05: [[f64; 9]; 34] = [
    [17.9693, 17.9693, 17.9693, 17.9693, 17.9693, 17.9693, 17.9693, 17.9693, 17.9693], // df = 1
    [6.0849, 6.0849, 6.0849, 6.0849, 6.0849, 6.0849, 6.0849, 6.0849, 6.0849], // df = 2
    [4.5007, 4.5156, 4.5156, 4.5156, 4.5156, 4.5156, 4.5156, 4.5156, 4.5156], // df = 3
    [3.9265, 4.0125, 4.0331, 4.0331, 4.0331, 4.0331, 4.0331, 4.0331, 4.0331], // df = 4
    [3.6354, 3.7485, 3.7965, 3.8137, 3.8144, 3.8144, 3.8144, 3.8144, 3.8144], // df = 5
    [3.4605, 3.5865, 3.6489, 3.6802, 3.6941, 3.6973, 3.6973, 3.6973, 3.6973], // df = 6
    [3.3441, 3.4772, 3.5483, 3.5883, 3.6106, 3.6217, 3.6255, 3.6255, 3.6255], // df = 7
    [3.2612, 3.3985, 3.4752, 3.5212, 3.5493, 3.5660, 3.5750, 3.5787, 3.5787], // df = 8
    [3.1992, 3.3391, 3.4198, 3.4700, 3.5023, 3.5231, 3.5361, 3.5436, 3.5470], // df = 9
    [3.1511, 3.2928, 3.3763, 3.4297, 3.4652, 3.4891, 3.5052, 3.5156, 3.5218], // df = 10
    [3.1127, 3.2557, 3.3413, 3.3971, 3.4351, 3.4615, 3.4800, 3.4927, 3.5012], // df = 11
    [3.0813, 3.2252, 3.3125, 3.3702, 3.4102, 3.4387, 3.4591, 3.4737, 3.4840], // df = 12
    [3.0552, 3.1998, 3.2883, 3.3476, 3.3893, 3.4194, 3.4415, 3.4577, 3.4695], // df = 13
    [3.0332, 3.1783, 3.2679, 3.3284, 3.3714, 3.4029, 3.4264, 3.4440, 3.4571], // df = 14
    [3.0143, 3.1598, 3.2502, 3.3118, 3.3560, 3.3887, 3.4133, 3.4321, 3.4464], // df = 15
    [2.9980, 3.1438, 3.2349, 3.2974, 3.3426, 3.3763, 3.4019, 3.4217, 3.4369], // df = 16
    [2.9837, 3.1298, 3.2215, 3.2848, 3.3308, 3.3654, 3.3919, 3.4125, 3.4286], // df = 17
    [2.9712, 3.1174, 3.2097, 3.2736, 3.3203, 3.3557, 3.3829, 3.4043, 3.4212], // df = 18
    [2.9600, 3.1064, 3.1991, 3.2636, 3.3110, 3.3470, 3.3750, 3.3970, 3.4146], // df = 19
    [2.9500, 3.0965, 3.1896, 3.2546, 3.3026, 3.3392, 3.3678, 3.3905, 3.4086], // df = 20
    [2.9410, 3.0876, 3.1811, 3.2466, 3.2950, 3.3322, 3.3613, 3.3845, 3.4033], // df = 21
    [2.9329, 3.0796, 3.1733, 3.2392, 3.2882, 3.3258, 3.3554, 3.3791, 3.3983], // df = 22
    [2.9255, 3.0723, 3.1663, 3.2326, 3.2819, 3.3199, 3.3500, 3.3742, 3.3939], // df = 23
    [2.9188, 3.0656, 3.1599, 3.2265, 3.2762, 3.3146, 3.3451, 3.3697, 3.3898], // df = 24
    [2.9126, 3.0595, 3.1540, 3.2208, 3.2709, 3.3097, 3.3405, 3.3655, 3.3860], // df = 25
    [2.9070, 3.0539, 3.1485, 3.2157, 3.2660, 3.3052, 3.3364, 3.3617, 3.3825], // df = 26
    [2.9017, 3.0487, 3.1435, 3.2109, 3.2615, 3.3010, 3.3325, 3.3581, 3.3792], // df = 27
    [2.8969, 3.0438, 3.1389, 3.2065, 3.2574, 3.2971, 3.3289, 3.3548, 3.3762], // df = 28
    [2.8924, 3.0394, 3.1345, 3.2024, 3.2535, 3.2935, 3.3255, 3.3517, 3.3734], // df = 29
    [2.8882, 3.0352, 3.1305, 3.1985, 3.2499, 3.2901, 3.3224, 3.3489, 3.3708], // df = 30
    [2.8582, 3.0053, 3.1015, 3.1709, 3.2238, 3.2657, 3.2998, 3.3280, 3.3518], // df = 40
    [2.8288, 2.9759, 3.0729, 3.1434, 3.1978, 3.2413, 3.2771, 3.3071, 3.3327], // df = 60
    [2.8000, 2.9469, 3.0446, 3.1163, 3.1720, 3.2170, 3.2544, 3.2862, 3.3135], // df = 120
    [2.7718, 2.9184, 3.0167, 3.0893, 3.1463, 3.1928, 3.2317, 3.2651, 3.2941], // df = inf
];
