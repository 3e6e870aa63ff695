//! Prompt templates attached to generated instances. Stored verbatim in
//! manifests so downstream video models receive the exact instruction the
//! dataset was built for.

use crate::tangram::TangramVariant;

pub const MAZE_VIDEO_PROMPT: &str = "\
Create a 2D animation based on the provided image of a maze.
The custom character slides smoothly along the white path, stopping perfectly on the red circle destination.
The character never slides or crosses into the black segments of the maze.
The camera is a static, top-down view showing the entire maze.
Maze:
* The maze paths are white, the walls are black.
* The character starts from its initial position.
* The character slides smoothly along the white path.
* The character never slides or crosses into the black segments of the maze.
* The character stops perfectly on the red circle.
Scene:
* No change in scene composition.
* No change in the layout of the maze.
* The character travels along the path without speeding up or slowing down.
Camera:
* Static camera.
* No zoom.
* No pan.
* No glitches, noise, or artifacts.";

pub const TANGRAM_FADE_IN_PROMPT: &str = "\
Create a 2D animation showing the step-by-step assembly of a Tangram puzzle.
Puzzle:
* The silhouette of the puzzle is represented as black area in the white background.
* The Tangram pieces include: 2 big triangles, 1 medium triangle, 2 small triangles, 1 square, and 1 parallelogram.
* The pieces appear one by one, fading in from transparent to their specific colors to fill the silhouette.
Colors:
* Big triangles: blue and orange
* Small triangles: purple and yellow
* Medium triangle: green
* Square: grey
* Parallelogram: red
Scene:
* No change in scene composition.
* No change in the silhouette of the puzzle.
Camera:
* Static camera.
* No zoom.
* No pan.
* No glitches, noise, or artifacts.";

pub const TANGRAM_ROTATION_PROMPT: &str = "\
Create a 2D animation showing the step-by-step assembly of a Tangram puzzle.
Puzzle:
* The silhouette of the puzzle is represented as black area in the white background.
* The Tangram pieces include: 2 big triangles, 1 medium triangle, 2 small triangles, 1 square, and 1 parallelogram.
* The shapes of the pieces can not be altered.
* Sequential accumulation constraint: Pieces move and orient individually one by one. Upon placement, every piece is permanently locked in place with its unique color and orientation. Continue until the silhouette is full.
Colors:
* Every piece has a distinct, unique color, as shown on the left side.
Scene:
* No change in scene composition.
* No change in the silhouette of the puzzle.
* No change in the designated colors and shapes of the pieces.
Camera:
* Static camera.
* No zoom.
* No pan.
* No glitches, noise, or artifacts.";

pub const TANGRAM_TRANSLATION_PROMPT: &str = "\
Create a 2D animation showing the step-by-step assembly of a Tangram puzzle.
Puzzle:
* The silhouette of the puzzle is represented as black area in the white background.
* The Tangram pieces include: 2 big triangles, 1 medium triangle, 2 small triangles, 1 square, and 1 parallelogram.
* The shapes of the pieces can not be altered.
* Sequential accumulation constraint: Pieces move individually one by one. Upon placement, every piece is permanently locked in place with its unique color and orientation. Continue until the silhouette is full.
Colors:
* Every piece has a distinct, unique color, as shown on the left side.
Scene:
* No change in scene composition.
* No change in the silhouette of the puzzle.
* No change in the designated colors and shapes of the pieces.
Camera:
* Static camera.
* No zoom.
* No pan.
* No glitches, noise, or artifacts.";

pub fn tangram_video_prompt(variant: TangramVariant) -> &'static str {
    match variant {
        TangramVariant::FadeIn => TANGRAM_FADE_IN_PROMPT,
        TangramVariant::Rotation => TANGRAM_ROTATION_PROMPT,
        TangramVariant::Translation => TANGRAM_TRANSLATION_PROMPT,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prompts_are_plain_multiline_text() {
        for p in [
            MAZE_VIDEO_PROMPT,
            TANGRAM_FADE_IN_PROMPT,
            TANGRAM_ROTATION_PROMPT,
            TANGRAM_TRANSLATION_PROMPT,
        ] {
            assert!(p.lines().count() > 10);
            assert!(!p.contains('\\'));
            assert!(!p.ends_with('\n'));
            for line in p.lines() {
                assert_eq!(line, line.trim(), "line has stray whitespace: {line:?}");
            }
        }
    }

    #[test]
    fn variant_prompts_describe_their_motion_model() {
        assert!(TANGRAM_FADE_IN_PROMPT.contains("fading in"));
        assert!(tangram_video_prompt(TangramVariant::Rotation).contains("move and orient"));
        assert!(tangram_video_prompt(TangramVariant::Translation).contains("Pieces move individually"));
        assert!(MAZE_VIDEO_PROMPT.contains("red circle"));
    }
}
