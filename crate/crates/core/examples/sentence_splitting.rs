//! Splits a markdown review comment into sentences the way the classifier
//! sees them: code blocks and inline code removed, abbreviations respected.

use tdlens::corpus::split_sentences;

const COMMENT: &str = "Thanks for the quick turnaround! A few remaining points, e.g. on naming:

1. `get_data()` and `getData()` both exist. Please keep one.
2. The vignette uses `library(devtools)` but does not explain why.

```r
x <- fetch(1)  # Not a sentence. Should be ignored.
```

See Smith et al. for a similar API. Version 0.2.1 fixes the crash? I think so.";

fn main() {
    for (i, s) in split_sentences(COMMENT).iter().enumerate() {
        println!("{i:>2}: {s}");
    }
}
