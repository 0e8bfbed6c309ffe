//! Run-length encoded masks: encoding, canonical form, areas and overlaps.
//!
//!     cargo run -p memtrack --example rle_masks

use memtrack::mask::{rle_decode, rle_encode, Bitmap, RleMask};

fn main() -> memtrack::Result<()> {
    let bitmap = Bitmap::from_rows(&[vec![false, true, true], vec![false, true, false]])?;
    let mask = rle_encode(&bitmap)?;
    // column-major: column 0 is background, columns 1-2 hold the shape
    println!("counts {:?}, area {}", mask.counts(), mask.area());
    assert_eq!(rle_decode(&mask)?, bitmap);

    // a leading foreground run is encoded with a zero background run
    let full = RleMask::new(2, 2, vec![0, 4])?;
    println!("full 2x2 counts {:?}", full.counts());

    // non-canonical input is normalised on load
    let merged = RleMask::new(2, 2, vec![1, 0, 1, 2])?;
    println!("[1, 0, 1, 2] normalises to {:?}", merged.counts());

    let a = RleMask::from_rect(8, 8, 0..4, 0..4)?;
    let b = RleMask::from_rect(8, 8, 2..6, 2..6)?;
    let inter = a.intersection_area(&b)?;
    let union = a.union_area(&b)?;
    println!(
        "intersection {inter}, union {union}, IoU {:.4}",
        inter as f64 / union as f64
    );

    let json = serde_json::to_string(&a).expect("masks serialise");
    println!("JSON form {json}");
    Ok(())
}
