#pragma once

#include <string>
#include <vector>

#include "mtnet/data.hpp"

namespace mtnet {

// Schema sidecar: JSON {"waves": w, "columns": [{"name", "kind",
// "categories"?}, ...]}. Unknown keys are rejected.
void save_schema(const CohortSchema& schema, const std::string& path);
CohortSchema load_schema(const std::string& path);

// Raw cohort CSV: header row, then one row per (subject, wave):
//   subject_id,wave,<schema columns...>
// with waves numbered from 1 and missing cells written as empty fields.
// Numbers use shortest round-trip formatting, so save/load is exact.
// Labels live in a second CSV: subject_id,label.
void save_raw_cohort(const RawCohort& cohort, const CohortSchema& schema,
                     const std::string& csv_path, const std::string& labels_path);
RawCohort load_raw_cohort(const std::string& csv_path, const std::string& labels_path,
                          const CohortSchema& schema);

void save_archetypes(const std::vector<std::string>& subject_ids,
                     const std::vector<int>& archetype, const std::string& path);

// Encoded cohort container, byte layout:
//   bytes 0..3   magic "MTEC"
//   bytes 4..7   format version, uint32 little-endian
//   bytes 8..15  header length H, uint64 little-endian
//   H bytes      JSON header {"n", "waves", "dim", "labels", "feature_names"}
//   then         n*waves*dim IEEE-754 doubles, little-endian, subject-major
// Round-trips are bitwise exact.
void save_encoded(const EncodedCohort& cohort, const std::string& path);
EncodedCohort load_encoded(const std::string& path);

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

}  // namespace mtnet
