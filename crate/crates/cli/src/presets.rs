//! Named parameter sets for every published figure. Each is a TOML document
//! merged beneath the user's config file.

const ROSEN_MORSE: &str = r#"
[physical]
m = 1.0
hbar = 0.25
T = 10.0
x0 = -5.0

[potential]
name = "rosen-morse"
V0 = 1.0
"#;

const SMOOTH_STEP: &str = r#"
[physical]
m = 1.0
hbar = 0.25
T = 10.0
x0 = -5.0

[potential]
name = "smooth-step"
V0 = 1.0
"#;

/// Field panels: x0 and x1 over [−15, 15], caustics traced over the same x0 range.
const FIELD: &str = r#"
[field]
x0_min = -15.0
x0_max = 15.0
x0_count = 61
x1_min = -15.0
x1_max = 15.0

[caustics]
x0_min = -15.0
x0_max = 15.0
x0_count = 301
v0_min = -8.0
v0_max = 8.0
v0_count = 1601
"#;

pub const NAMES: [&str; 10] = [
    "rosen-morse-fig2",
    "rosen-morse-fig3",
    "rosen-morse-fig5",
    "rosen-morse-fig6-n5",
    "rosen-morse-fig6-n10",
    "rosen-morse-fig6-n15",
    "smooth-step-fig8-n5",
    "smooth-step-fig8-n10",
    "smooth-step-fig8-n20",
    "rosen-morse-fig9",
];

/// The TOML text of a preset.
pub fn get(name: &str) -> Option<&'static str> {
    static TEXTS: std::sync::OnceLock<Vec<(&'static str, &'static str)>> = std::sync::OnceLock::new();
    let texts = TEXTS.get_or_init(|| {
        let leak = |s: String| -> &'static str { Box::leak(s.into_boxed_str()) };
        let panel = |base: &str, n: usize| leak(format!("{}{FIELD}", with_slices(base, n)));
        vec![
            ("rosen-morse-fig2", leak(with_slices(ROSEN_MORSE, 20))),
            (
                "rosen-morse-fig3",
                leak(format!("{}\n[converge]\nN_list = [2, 6, 11, 16]\n", with_slices(ROSEN_MORSE, 16))),
            ),
            (
                "rosen-morse-fig5",
                leak(format!(
                    "{}\n[method]\nmode = \"eikonal\"\n\n[caustics]\nv0_min = -5.0\nv0_max = 5.0\nv0_count = 1001\ntime_steps = 100\n",
                    with_slices(ROSEN_MORSE, 100)
                )),
            ),
            ("rosen-morse-fig6-n5", panel(ROSEN_MORSE, 5)),
            ("rosen-morse-fig6-n10", panel(ROSEN_MORSE, 10)),
            ("rosen-morse-fig6-n15", panel(ROSEN_MORSE, 15)),
            ("smooth-step-fig8-n5", panel(SMOOTH_STEP, 5)),
            ("smooth-step-fig8-n10", panel(SMOOTH_STEP, 10)),
            ("smooth-step-fig8-n20", panel(SMOOTH_STEP, 20)),
            (
                "rosen-morse-fig9",
                leak(format!(
                    "{}\n[converge]\nN_list = [{}]\neikonal_from = 65\n",
                    with_slices(ROSEN_MORSE, 1024),
                    fig9_sizes().iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ")
                )),
            ),
        ]
    });
    texts.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

fn with_slices(base: &str, n: usize) -> String {
    base.replacen("[physical]\n", &format!("[physical]\nN = {n}\n"), 1)
}

/// 61 distinct sizes from 2 to 1024, logarithmically spaced where the
/// spacing exceeds one.
pub fn fig9_sizes() -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(61);
    for i in 0..61 {
        let mut n = (2.0 * 512f64.powf(i as f64 / 60.0)).round() as usize;
        if let Some(&last) = out.last() {
            n = n.max(last + 1);
        }
        out.push(n);
    }
    out
}
