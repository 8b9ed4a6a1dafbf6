use unicode_normalization::UnicodeNormalization;

/// Pre-metric normalization: NFC, LF line endings, no trailing whitespace,
/// runs of three or more blank lines collapsed to one, outer blank lines
/// removed. Idempotent.
pub fn canonicalize(text: &str) -> String {
    let unified = text.replace("\r\n", "\n").replace('\r', "\n");
    let nfc: String = unified.nfc().collect();
    let lines: Vec<&str> = nfc.split('\n').map(str::trim_end).collect();

    let mut out: Vec<&str> = Vec::with_capacity(lines.len());
    let mut i = 0;
    while i < lines.len() {
        if lines[i].is_empty() {
            let run = lines[i..].iter().take_while(|l| l.is_empty()).count();
            let keep = if run >= 3 { 1 } else { run };
            out.extend(std::iter::repeat("").take(keep));
            i += run;
        } else {
            out.push(lines[i]);
            i += 1;
        }
    }
    let start = out.iter().position(|l| !l.is_empty()).unwrap_or(out.len());
    let end = out.iter().rposition(|l| !l.is_empty()).map_or(start, |e| e + 1);
    out[start..end].join("\n")
}
