use qep_core::text::porter::stem;

#[test]
fn reference_vocabulary() {
    let data = include_str!("data/porter_vectors.tsv");
    let mut checked = 0;
    let mut wrong = Vec::new();
    for line in data.lines().filter(|l| !l.is_empty()) {
        let (word, expected) = line.split_once('\t').expect("word<TAB>stem");
        let got = stem(word);
        if got != expected {
            wrong.push(format!("{word}: got {got}, want {expected}"));
        }
        checked += 1;
    }
    assert!(checked > 1000);
    assert!(wrong.is_empty(), "{} mismatches:\n{}", wrong.len(), wrong.join("\n"));
}
