#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace freqbias {

/// Variant-by-timepoint count matrix.
///
/// `counts[t][v]` is the number of tokens of variant `variant_ids[v]`
/// observed at `timepoints[t]`.  Timepoints are strictly increasing and
/// every row spans the same variant columns; zero counts are kept so the
/// column set is stable across the whole series.
struct FrequencyTable {
  std::vector<int> timepoints;
  std::vector<std::string> variant_ids;
  std::vector<std::vector<std::int64_t>> counts;

  std::size_t n_timepoints() const { return timepoints.size(); }
  std::size_t n_variants() const { return variant_ids.size(); }
};

/// Throws InputError unless the table is structurally sound: strictly
/// increasing timepoints, one count row per timepoint, one column per
/// variant id, and no negative counts.
void validate_table(const FrequencyTable& table);

/// Serializes as CSV with header `timepoint,<id>,<id>,...` and one row of
/// counts per timepoint.
std::string table_to_csv(const FrequencyTable& table);

/// Parses the CSV form produced by table_to_csv.  Throws InputError with a
/// line number on malformed input.
FrequencyTable table_from_csv(const std::string& text);

/// Serializes as a JSON object {"timepoints", "variant_ids", "counts"}.
std::string table_to_json_text(const FrequencyTable& table);

/// Parses the JSON form produced by table_to_json_text.
FrequencyTable table_from_json_text(const std::string& text);

/// Reads a table from disk, picking the parser by file extension
/// (".json" for JSON, anything else is treated as CSV).
FrequencyTable load_table(const std::string& path);

/// Writes `text` to `path`, throwing InputError on I/O failure.
void write_text_file(const std::string& path, const std::string& text);

/// Reads the whole file at `path`, throwing InputError if it cannot be read.
std::string read_text_file(const std::string& path);

}  // namespace freqbias
