use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wavelet family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", content = "order", rename_all = "lowercase")]
pub enum Family {
    Haar,
    Daubechies(u8),
}

impl Family {
    pub fn parse(family: &str, order: u32) -> Result<Self> {
        match family.to_ascii_lowercase().as_str() {
            "haar" => {
                if order != 1 {
                    return Err(Error::Config(format!("haar admits only order 1, got {order}")));
                }
                Ok(Family::Haar)
            }
            "daubechies" | "db" => {
                if !(1..=10).contains(&order) {
                    return Err(Error::Config(format!("daubechies order {order} not in 1..=10")));
                }
                Ok(Family::Daubechies(order as u8))
            }
            other => Err(Error::Config(format!("unsupported wavelet family '{other}'"))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Haar => write!(f, "haar"),
            Family::Daubechies(o) => write!(f, "daubechies({o})"),
        }
    }
}

/// Orthonormal compactly supported wavelet filter pair.
///
/// The scaling function obeys `φ(x) = √2 Σ h_k φ(2x − k)` and the detail filter
/// is the alternating flip `g_k = (−1)^k h_{L−1−k}`.  Basis functions indexed by
/// a cube `I` are supported in `mI` with `m = support_factor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletBasis {
    pub family: Family,
    pub scaling_filter: Vec<f64>,
    pub detail_filter: Vec<f64>,
    pub support_factor: f64,
    pub vanishing_moments: u32,
}

impl WaveletBasis {
    pub fn haar() -> Self {
        build_basis(Family::Haar).expect("haar is always available")
    }

    pub fn daubechies(order: u32) -> Result<Self> {
        build_basis(Family::parse("daubechies", order)?)
    }

    pub fn filter_len(&self) -> usize {
        self.scaling_filter.len()
    }
}

/// Builds a basis from a family name and order, e.g. `("daubechies", 4)`.
pub fn build_basis_named(family: &str, order: u32) -> Result<WaveletBasis> {
    build_basis(Family::parse(family, order)?)
}

pub fn build_basis(family: Family) -> Result<WaveletBasis> {
    let order = match family {
        Family::Haar => 1,
        Family::Daubechies(o) if (1..=10).contains(&o) => o as usize,
        Family::Daubechies(o) => return Err(Error::Config(format!("daubechies order {o} not in 1..=10"))),
    };
    let h: Vec<f64> = DAUBECHIES[order - 1].to_vec();
    let len = h.len();
    let g: Vec<f64> = (0..len).map(|k| if k % 2 == 0 { h[len - 1 - k] } else { -h[len - 1 - k] }).collect();
    Ok(WaveletBasis {
        family,
        scaling_filter: h,
        detail_filter: g,
        // ψ_{j,k} lives on 2^{-j}[k, k + L − 1]; the cube of side m·2^{-j}
        // centered at x_I covers it once m ≥ 2L − 3.
        support_factor: (2 * len - 3) as f64,
        vanishing_moments: order as u32,
    })
}

/// Minimum-phase Daubechies scaling filters, normalized to `Σ h_k = √2`.
#[allow(clippy::excessive_precision)]
static DAUBECHIES: [&[f64]; 10] = [
    // order 1
    &[
        0.70710678118654752440,
        0.70710678118654752440,
    ],
    // order 2
    &[
        0.48296291314453414337,
        0.83651630373780790558,
        0.22414386804201338103,
        -0.12940952255126038117,
    ],
    // order 3
    &[
        0.33267055295008261600,
        0.80689150931109257649,
        0.45987750211849157010,
        -0.13501102001025458870,
        -0.085441273882026661693,
        0.035226291885709536603,
    ],
    // order 4
    &[
        0.23037781330889650086,
        0.71484657055291564709,
        0.63088076792985890788,
        -0.027983769416859854211,
        -0.18703481171909308408,
        0.030841381835560763627,
        0.032883011666885199735,
        -0.010597401785069032105,
    ],
    // order 5
    &[
        0.16010239797419291448,
        0.60382926979718967054,
        0.72430852843777292773,
        0.13842814590132073151,
        -0.24229488706638203186,
        -0.032244869584638374648,
        0.077571493840045713523,
        -0.0062414902127982742742,
        -0.012580751999081999469,
        0.0033357252854737712780,
    ],
    // order 6
    &[
        0.11154074335010946362,
        0.49462389039845308568,
        0.75113390802109535068,
        0.31525035170919762909,
        -0.22626469396543982008,
        -0.12976686756726193556,
        0.097501605587323049102,
        0.027522865530305728626,
        -0.031582039317486029565,
        0.00055384220116149613925,
        0.0047772575109455106396,
        -0.0010773010853084795649,
    ],
    // order 7
    &[
        0.077852054085009179020,
        0.39653931948191730654,
        0.72913209084623511992,
        0.46978228740519312247,
        -0.14390600392856497541,
        -0.22403618499387498264,
        0.071309219266830264751,
        0.080612609151083071913,
        -0.038029936935014413580,
        -0.016574541630666880654,
        0.012550998556099840613,
        0.00042957797292136652113,
        -0.0018016407040474909153,
        0.00035371379997452024845,
    ],
    // order 8
    &[
        0.054415842243104009955,
        0.31287159091429997066,
        0.67563073629728980681,
        0.58535468365420671277,
        -0.015829105256349305667,
        -0.28401554296154692652,
        0.00047248457391328277036,
        0.12874742662047845886,
        -0.017369301001807546170,
        -0.044088253930794751507,
        0.013981027917398281649,
        0.0087460940474057767164,
        -0.0048703529934515743104,
        -0.00039174037337694704630,
        0.00067544940645056936637,
        -0.00011747678412476953373,
    ],
    // order 9
    &[
        0.038077947363878346589,
        0.24383467461259035373,
        0.60482312369011111190,
        0.65728807805130053808,
        0.13319738582500757619,
        -0.29327378327917490881,
        -0.096840783222976460514,
        0.14854074933810638014,
        0.030725681479333379212,
        -0.067632829061329973676,
        0.00025094711483145195759,
        0.022361662123679097205,
        -0.0047232047577513972779,
        -0.0042815036824634298345,
        0.0018476468830562264766,
        0.00023038576352319596721,
        -0.00025196318894271013697,
        0.000039347320316271599481,
    ],
    // order 10
    &[
        0.026670057900555553587,
        0.18817680007769148902,
        0.52720118893172558648,
        0.68845903945360356574,
        0.28117234366057746075,
        -0.24984642432731537942,
        -0.19594627437737704350,
        0.12736934033579326008,
        0.093057364603572351160,
        -0.071394147166397087145,
        -0.029457536821875812858,
        0.033212674059341001740,
        0.0036065535669561696554,
        -0.010733175483330575044,
        0.0013953517470529011658,
        0.0019924052951850561172,
        -0.00068585669495971162656,
        -0.00011646685512928545095,
        0.000093588670320069591334,
        -0.000013264202894521244812,
    ],];
