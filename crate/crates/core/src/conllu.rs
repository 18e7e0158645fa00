//! Reader and writer for the 10-column CoNLL-U format.
//!
//! Multiword-token lines (`3-4`) and empty nodes (`5.1`) are skipped; only
//! syntactic words are kept. Sentence ids come from `# sent_id = ...`
//! comments when present.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::CorpusError;

/// One syntactic word of a dependency parse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedToken {
    /// 1-based position in the sentence.
    pub index: usize,
    pub form: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma: Option<String>,
    pub upos: String,
    /// Index of the head token, 0 for the root.
    pub head: usize,
    pub deprel: String,
}

impl ParsedToken {
    /// Relation label without its subtype (`nsubj:pass` -> `nsubj`).
    pub fn base_deprel(&self) -> &str {
        self.deprel.split(':').next().unwrap_or("")
    }

    pub fn is_root(&self) -> bool {
        self.head == 0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConlluSentence {
    pub id: Option<String>,
    pub text: Option<String>,
    pub tokens: Vec<ParsedToken>,
}

/// Checks the tree-shape invariants of a token sequence: contiguous 1-based
/// indices, heads in range and not self-referential, exactly one root.
pub fn validate_tokens(tokens: &[ParsedToken]) -> Result<(), String> {
    if tokens.is_empty() {
        return Err("sentence has no tokens".into());
    }
    let n = tokens.len();
    let mut roots = 0;
    for (pos, tok) in tokens.iter().enumerate() {
        if tok.index != pos + 1 {
            return Err(format!("token {} found at position {}", tok.index, pos + 1));
        }
        if tok.head > n {
            return Err(format!("token {} has out-of-range head {}", tok.index, tok.head));
        }
        if tok.head == tok.index {
            return Err(format!("token {} is its own head", tok.index));
        }
        if tok.head == 0 {
            roots += 1;
        }
    }
    if roots != 1 {
        return Err(format!("expected exactly one root, found {roots}"));
    }
    Ok(())
}

pub fn parse_str(input: &str) -> Result<Vec<ConlluSentence>, CorpusError> {
    let mut sentences = Vec::new();
    let mut current = ConlluSentence::default();
    let mut start_line = 1;

    let mut finish = |current: &mut ConlluSentence, line: usize| -> Result<(), CorpusError> {
        if current.tokens.is_empty() && current.id.is_none() && current.text.is_none() {
            return Ok(());
        }
        validate_tokens(&current.tokens).map_err(|message| CorpusError::Conllu { line, message })?;
        sentences.push(std::mem::take(current));
        Ok(())
    };

    for (lineno, raw) in input.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            finish(&mut current, start_line)?;
            start_line = lineno + 1;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                match key.trim() {
                    "sent_id" => current.id = Some(value.trim().to_string()),
                    "text" => current.text = Some(value.trim().to_string()),
                    _ => {}
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(CorpusError::Conllu {
                line: lineno,
                message: format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let bad = |what: &str| CorpusError::Conllu { line: lineno, message: format!("invalid {what}") };
        let index: usize = cols[0].parse().map_err(|_| bad("ID"))?;
        let head: usize = cols[6].parse().map_err(|_| bad("HEAD"))?;
        current.tokens.push(ParsedToken {
            index,
            form: cols[1].to_string(),
            lemma: (cols[2] != "_").then(|| cols[2].to_string()),
            upos: cols[3].to_string(),
            head,
            deprel: cols[7].to_string(),
        });
    }
    finish(&mut current, start_line)?;
    Ok(sentences)
}

pub fn read_file(path: impl AsRef<Path>) -> Result<Vec<ConlluSentence>, CorpusError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
    parse_str(&text)
}

pub fn to_string(sentences: &[ConlluSentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        if let Some(id) = &s.id {
            let _ = writeln!(out, "# sent_id = {id}");
        }
        if let Some(text) = &s.text {
            let _ = writeln!(out, "# text = {text}");
        }
        for t in &s.tokens {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t_",
                t.index,
                t.form,
                t.lemma.as_deref().unwrap_or("_"),
                t.upos,
                t.head,
                t.deprel
            );
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SUSHI: &str = "# sent_id = x1\n# text = The sushi is yummy\n\
1\tThe\tthe\tDET\tDT\t_\t2\tdet\t_\t_\n\
2\tsushi\tsushi\tNOUN\tNN\t_\t4\tnsubj\t_\t_\n\
3\tis\tbe\tAUX\tVBZ\t_\t4\tcop\t_\t_\n\
4\tyummy\tyummy\tADJ\tJJ\t_\t0\troot\t_\t_\n\n";

    #[test]
    fn parses_comments_and_columns() {
        let s = parse_str(SUSHI).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].id.as_deref(), Some("x1"));
        assert_eq!(s[0].text.as_deref(), Some("The sushi is yummy"));
        assert_eq!(s[0].tokens[1].deprel, "nsubj");
        assert_eq!(s[0].tokens[3].head, 0);
    }

    #[test]
    fn skips_multiword_and_empty_nodes() {
        let input = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n\
1\tdo\tdo\tAUX\t_\t_\t3\taux\t_\t_\n\
2\tn't\tnot\tPART\t_\t_\t3\tadvmod\t_\t_\n\
2.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n\
3\tgo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n";
        let s = parse_str(input).unwrap();
        assert_eq!(s[0].tokens.len(), 3);
    }

    #[test]
    fn rejects_out_of_range_head() {
        let input = "1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n2\tb\t_\tX\t_\t_\t7\tdep\t_\t_\n";
        assert!(matches!(parse_str(input), Err(CorpusError::Conllu { .. })));
    }

    #[test]
    fn rejects_two_roots_and_wrong_column_count() {
        let two_roots = "1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n2\tb\t_\tX\t_\t_\t0\troot\t_\t_\n";
        assert!(parse_str(two_roots).is_err());
        let err = parse_str("1\ta\tX\n").unwrap_err();
        assert!(matches!(err, CorpusError::Conllu { line: 1, .. }));
    }

    #[test]
    fn writer_round_trips() {
        let s = parse_str(SUSHI).unwrap();
        assert_eq!(parse_str(&to_string(&s)).unwrap(), s);
    }
}
