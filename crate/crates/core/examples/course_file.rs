//! Read a course file, then write it back in canonical form.

use peak_traj::io::{course_document_to_json, parse_course_document};

fn main() -> peak_traj::Result<()> {
    let text = r#"{
        "name": "stairs",
        "waypoints": [
            [0, 0, 1],
            {"position": [1, 0, 1.5], "velocity": [1, 0, 0]},
            [2, 1, 2],
            {"position": [3, 1, 2.5], "velocity": [0, 0, 0], "acceleration": [0, 0, 0]}
        ],
        "limits": {"velocity": 4, "acceleration": 14, "jerk": 60, "snap": 600},
        "preset": "snap",
        "order": 7
    }"#;
    let doc = parse_course_document(text.as_bytes())?;
    println!("{} legs, lengths {:.3?}", doc.course.num_segments(), doc.course.leg_lengths());
    print!("{}", course_document_to_json(&doc)?);

    match parse_course_document(br#"{"waypoints": [[0,0,0],[0,0,0]]}"#) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
