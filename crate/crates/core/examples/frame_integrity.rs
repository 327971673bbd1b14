//! Building and checking integrity frames by hand.

use threestage::{build_frame, verify_frame, FrameSpec};

fn main() -> threestage::Result<()> {
    let spec = FrameSpec::new(8, 4, vec![1, 0, 1, 1])?;
    let data = [1, 0, 1, 1, 0, 0, 1, 0];
    let frame = build_frame(&data, &spec)?;
    println!("frame  {:?}", frame);
    println!("clean  {:?}", verify_frame(&frame, &spec)?);

    let mut flipped = frame.clone();
    flipped[5] ^= 1;
    println!("data   {:?}", verify_frame(&flipped, &spec)?);

    let mut flipped = frame.clone();
    flipped[spec.frame_length() - 1] ^= 1;
    println!("known  {:?}", verify_frame(&flipped, &spec)?);

    println!(
        "a random {}-bit string passes with probability {}",
        spec.frame_length(),
        spec.random_acceptance_probability()
    );
    Ok(())
}
