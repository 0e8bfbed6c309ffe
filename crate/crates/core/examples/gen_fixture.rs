//! Generates a synthetic fixture and writes it in the `memtrack/1` formats.
//!
//!     cargo run -p memtrack --example gen_fixture [out_dir]

use memtrack::synth::{generate_fixture, FixtureSpec, Lookalike, Occlusion, ProposalSource};

fn main() -> memtrack::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "target/fixture-demo".into());
    let spec = FixtureSpec {
        videos: 2,
        n_distractors: 1,
        noise_sigma: 0.05,
        occlusions: vec![Occlusion {
            object: 0,
            frames: [4, 6],
        }],
        lookalikes: vec![Lookalike {
            object: 1,
            from_frame: 5,
            cosine: 0.5,
        }],
        ..FixtureSpec::simple(42, 2, 6, 10)
    };
    let fixture = generate_fixture(&spec)?;
    let paths = fixture.write_to(&out)?;

    println!(
        "wrote {} and {} proposal files",
        paths.ground_truth.display(),
        paths.proposals.len()
    );
    for (t, frame) in fixture.sources[0].iter().enumerate().take(7) {
        let labels: Vec<String> = frame
            .iter()
            .map(|s| match s {
                ProposalSource::Object(k) => format!("obj{k}"),
                ProposalSource::Occluded(k) => format!("occ{k}"),
                ProposalSource::Distractor(k) => format!("dis{k}"),
                ProposalSource::Lookalike(k) => format!("look{k}"),
                ProposalSource::Background => "bg".into(),
            })
            .collect();
        println!("frame {t}: {}", labels.join(" "));
    }
    Ok(())
}
