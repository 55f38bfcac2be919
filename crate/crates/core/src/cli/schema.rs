//! Per-subcommand key schemas; the clap parser and the config-file reader
//! are both generated from these tables.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Int,
    Float,
    FloatList,
    Path,
    Flag,
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub kind: Kind,
    pub required: bool,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn req(name: &'static str, kind: Kind, help: &'static str) -> KeySpec {
    KeySpec {
        name,
        kind,
        required: true,
        default: None,
        help,
    }
}

const fn opt(name: &'static str, kind: Kind, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec {
        name,
        kind,
        required: false,
        default: Some(default),
        help,
    }
}

const fn maybe(name: &'static str, kind: Kind, help: &'static str) -> KeySpec {
    KeySpec {
        name,
        kind,
        required: false,
        default: None,
        help,
    }
}

const fn flag(name: &'static str, help: &'static str) -> KeySpec {
    KeySpec {
        name,
        kind: Kind::Flag,
        required: false,
        default: None,
        help,
    }
}

const N: KeySpec = req("n", Kind::Int, "space dimension (1 to 3)");
const ALPHA: KeySpec = req("alpha", Kind::Float, "exponent of f_alpha = |x|^-alpha");
const S: KeySpec = req("s", Kind::Float, "smoothness of the domain space H^s_2");
const T: KeySpec = req("t", Kind::Float, "smoothness index of the target space H^-t_2");

/// Keys accepted by every subcommand.
pub const COMMON: &[KeySpec] = &[
    opt("out", Kind::Path, "out", "output directory"),
    maybe("config", Kind::Path, "plain-text key=value file; flags override it"),
    flag("dump", "also write fields in the binary dump format"),
    flag("strict", "treat aliasing warnings as numeric failures (exit 3)"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    FtCheck,
    DecaySweep,
    UnifNorm,
    Membership,
    Growth,
    Opnorm,
    Counterexample,
}

impl Subcommand {
    pub const ALL: [Subcommand; 7] = [
        Subcommand::FtCheck,
        Subcommand::DecaySweep,
        Subcommand::UnifNorm,
        Subcommand::Membership,
        Subcommand::Growth,
        Subcommand::Opnorm,
        Subcommand::Counterexample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::FtCheck => "ft-check",
            Subcommand::DecaySweep => "decay-sweep",
            Subcommand::UnifNorm => "unif-norm",
            Subcommand::Membership => "membership",
            Subcommand::Growth => "growth",
            Subcommand::Opnorm => "opnorm",
            Subcommand::Counterexample => "counterexample",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn about(self) -> &'static str {
        match self {
            Subcommand::FtCheck => {
                "Riesz Fourier-transform law F(f_alpha) = C(alpha,n) f_(n-alpha): \
                 dft(eta f_alpha) against the convolution oracle"
            }
            Subcommand::DecaySweep => {
                "Uniform cutoff-decay lemma: sup_xi |F(eta f_alpha(.+z))| (1+|xi|^2)^((n-alpha)/2) over shifts z"
            }
            Subcommand::UnifNorm => {
                "Uniformly localized norm sup_z ||eta f_alpha(.+z)||_(H^-t_p) over a shift sweep"
            }
            Subcommand::Membership => {
                "Membership criterion f_alpha in H^-t_(2,unif) iff alpha < min(n, t + n/2); \
                 with --s, the multiplier criterion f_alpha in M[s,-t] iff alpha < s + t"
            }
            Subcommand::Growth => {
                "Necessity estimate: growth exponent of the eta_m bilinear integral against the m^n bound"
            }
            Subcommand::Opnorm => {
                "Multiplier norm from the definition: largest singular value of J_-t M_mu J_-s (mu = f_alpha, or 1 without --alpha)"
            }
            Subcommand::Counterexample => {
                "Sharp embedding theorem: f_alpha with alpha = s + t + delta(eps) lies in \
                 H^-min(s,t)_(n/max(s,t)-eps, unif) but is not a multiplier"
            }
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Subcommand::Opnorm)
    }

    pub fn keys(self) -> Vec<KeySpec> {
        use Kind::*;
        let mut keys: Vec<KeySpec> = match self {
            Subcommand::FtCheck => vec![
                N,
                ALPHA,
                opt("L", Float, "16", "half-extent of the grid [-L, L)^n"),
                opt("N", Int, "4096", "points per axis (power of two)"),
                opt("xi-max", Float, "20", "largest |xi| compared against the oracle"),
            ],
            Subcommand::DecaySweep => vec![
                N,
                ALPHA,
                opt("L", Float, "8", "half-extent of the grid"),
                opt("N", Int, "128", "points per axis"),
                opt("z", FloatList, "0,2,4,8,16", "shift lengths |z|, taken along the first axis"),
            ],
            Subcommand::UnifNorm => vec![
                N,
                ALPHA,
                T,
                opt("p", Float, "2", "integrability exponent"),
                opt("L", Float, "8", "half-extent of the grid"),
                opt("N", Int, "256", "points per axis"),
                opt("radii", FloatList, "0,1,2,4,8,16", "sweep radii"),
                maybe("directions", Int, "directions per radius (default 2, 8, 26 for n = 1, 2, 3)"),
            ],
            Subcommand::Membership => vec![
                N,
                ALPHA,
                T,
                maybe("s", Float, "domain smoothness; switches to the multiplier criterion"),
                flag("analytic-only", "skip the numeric evidence"),
                maybe("L", Float, "half-extent of the ladder grids"),
                maybe("N", Int, "coarsest ladder resolution"),
                opt("levels", Int, "3", "number of ladder grids"),
                opt("m", FloatList, "4,8,16,32,64", "cutoff scales for the multiplier evidence"),
            ],
            Subcommand::Growth => vec![
                N,
                S,
                T,
                ALPHA,
                opt("m", FloatList, "4,8,16,32,64", "cutoff scales m (at least 4, increasing)"),
                opt("quad-points", Int, "512", "Gauss nodes per radial axis (multiple of 8)"),
            ],
            Subcommand::Opnorm => vec![
                N,
                S,
                T,
                maybe("alpha", Float, "multiplier f_alpha; omitted means mu = 1"),
                req("seed", Int, "seed of the random start vector"),
                opt("L", Float, "8", "half-extent of the grid"),
                opt("N", Int, "256", "points per axis"),
                opt("tol", Float, "1e-8", "relative stopping tolerance"),
                opt("max-iters", Int, "500", "iteration cap"),
            ],
            Subcommand::Counterexample => vec![
                N,
                S,
                T,
                req("eps", Float, "distance below the sharp index p1 = n/max(s,t)"),
                opt("L", Float, "8", "half-extent of the ladder grids"),
                opt("N", Int, "256", "finest ladder resolution"),
                opt("levels", Int, "3", "number of ladder grids, halving N each step"),
                opt("m", FloatList, "4,8,16,32", "cutoff scales for the growth experiment"),
            ],
        };
        keys.extend_from_slice(COMMON);
        keys
    }
}
