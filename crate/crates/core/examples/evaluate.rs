//! Objective metrics on hand-made inputs.

use ndarray::array;
use prosody_clone::align::PhoneSequence;
use prosody_clone::dsp::PitchContour;
use prosody_clone::metrics::{dtw_frames, ffe, gpe, gpe_with, per, vde, GpeDefinition};

fn main() -> prosody_clone::Result<()> {
    let x = array![[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]];
    let y = array![[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [2.0, 2.0]];
    let r = dtw_frames(x.view(), y.view())?;
    println!(
        "dtw cost {:.3}  path {:?}  msd {:.3}",
        r.total_cost,
        r.path,
        r.total_cost / x.nrows() as f64
    );

    let reference = PitchContour::new(vec![100.0, 100.0, 0.0, 200.0, 0.0, 150.0])?;
    let hypothesis = PitchContour::new(vec![100.0, 130.0, 0.0, 0.0, 120.0, 160.0])?;
    println!("vde frames {:?}", vde(&reference, &hypothesis)?);
    println!("gpe frames {:?}", gpe(&reference, &hypothesis)?);
    println!(
        "gpe frames {:?} (voiced in both)",
        gpe_with(&reference, &hypothesis, GpeDefinition::VoicedBoth)?
    );
    println!("ffe {:.3}", ffe(&reference, &hypothesis)?);

    let phones = |s: &str| PhoneSequence::new(s.split_whitespace().map(String::from));
    println!("per {:.3}", per(&phones("h e l o"), &phones("h a l o u"))?);
    Ok(())
}
