//! Non-actionable feature lists for the five benchmark datasets.

pub const ADULT: &[&str] = &[
    "age",
    "education",
    "marital_status",
    "relationship",
    "race",
    "sex",
    "native_country",
];
pub const COMPAS: &[&str] = &["age", "age_cat", "race", "sex"];
pub const DIABETES: &[&str] = &["age", "pregnancies"];
pub const FICO: &[&str] = &["externalRiskEstimate"];
pub const GERMAN_CREDIT: &[&str] = &["age", "sex"];

/// Looks up a preset by dataset name (case-insensitive; `-`, `_` and spaces ignored).
pub fn non_actionable(dataset: &str) -> Option<&'static [&'static str]> {
    let key: String = dataset
        .chars()
        .filter(|c| !matches!(c, '-' | '_' | ' '))
        .flat_map(char::to_lowercase)
        .collect();
    match key.as_str() {
        "adult" | "adultincome" | "adultcensusincome" => Some(ADULT),
        "compas" => Some(COMPAS),
        "diabetes" | "pima" => Some(DIABETES),
        "fico" | "heloc" => Some(FICO),
        "german" | "germancredit" | "credit" => Some(GERMAN_CREDIT),
        _ => None,
    }
}
