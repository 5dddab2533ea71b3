use msa_core::fixtures;

fn main() {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "fixtures".to_string());
    let cases = [
        ("portal_frame.json", fixtures::portal_frame(1e-8)),
        ("portal_frame_healthy.json", fixtures::portal_frame(1.0)),
        (
            "portal_frame_two_weak.json",
            fixtures::portal_frame_two_weak(1e-8),
        ),
        ("unrestrained_frame.json", fixtures::unrestrained_frame()),
    ];
    for (name, model) in cases {
        std::fs::write(format!("{dir}/{name}"), model.to_json()).unwrap();
    }
}
