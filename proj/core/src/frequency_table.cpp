#include "freqbias/frequency_table.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "freqbias/errors.hpp"

namespace freqbias {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename Int>
Int parse_int_field(const std::string& field, const char* what, std::size_t line_no) {
  Int value{};
  const char* first = field.data();
  const char* last = first + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw InputError("non-integer " + std::string(what) + " '" + field + "', line " +
                     std::to_string(line_no));
  }
  return value;
}

}  // namespace

void validate_table(const FrequencyTable& table) {
  if (table.timepoints.empty()) throw InputError("frequency table has no timepoints");
  if (table.variant_ids.empty()) throw InputError("frequency table has no variants");
  for (std::size_t t = 1; t < table.timepoints.size(); ++t) {
    if (table.timepoints[t] <= table.timepoints[t - 1]) {
      throw InputError("timepoints not strictly increasing at index " + std::to_string(t));
    }
  }
  if (table.counts.size() != table.timepoints.size()) {
    throw InputError("count rows (" + std::to_string(table.counts.size()) +
                     ") do not match timepoints (" + std::to_string(table.timepoints.size()) + ")");
  }
  for (std::size_t t = 0; t < table.counts.size(); ++t) {
    if (table.counts[t].size() != table.variant_ids.size()) {
      throw InputError("count row " + std::to_string(t) + " has " +
                       std::to_string(table.counts[t].size()) + " columns, expected " +
                       std::to_string(table.variant_ids.size()));
    }
    for (const auto c : table.counts[t]) {
      if (c < 0) throw InputError("negative count at timepoint index " + std::to_string(t));
    }
  }
}

std::string table_to_csv(const FrequencyTable& table) {
  std::ostringstream out;
  out << "timepoint";
  for (const auto& id : table.variant_ids) out << ',' << id;
  out << '\n';
  for (std::size_t t = 0; t < table.timepoints.size(); ++t) {
    out << table.timepoints[t];
    for (const auto c : table.counts[t]) out << ',' << c;
    out << '\n';
  }
  return out.str();
}

FrequencyTable table_from_csv(const std::string& text) {
  FrequencyTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (!saw_header) {
      if (fields.empty() || fields[0] != "timepoint") {
        throw InputError("expected header starting with 'timepoint', line " +
                         std::to_string(line_no));
      }
      if (fields.size() < 2) {
        throw InputError("header has no variant columns, line " + std::to_string(line_no));
      }
      table.variant_ids.assign(fields.begin() + 1, fields.end());
      saw_header = true;
      continue;
    }
    if (fields.size() != table.variant_ids.size() + 1) {
      throw InputError("expected " + std::to_string(table.variant_ids.size() + 1) +
                       " fields, got " + std::to_string(fields.size()) + ", line " +
                       std::to_string(line_no));
    }
    table.timepoints.push_back(parse_int_field<int>(fields[0], "timepoint", line_no));
    std::vector<std::int64_t> row;
    row.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      row.push_back(parse_int_field<std::int64_t>(fields[i], "count", line_no));
    }
    table.counts.push_back(std::move(row));
  }
  if (!saw_header) throw InputError("empty frequency table CSV");
  validate_table(table);
  return table;
}

std::string table_to_json_text(const FrequencyTable& table) {
  nlohmann::json j;
  j["timepoints"] = table.timepoints;
  j["variant_ids"] = table.variant_ids;
  j["counts"] = table.counts;
  return j.dump(2) + "\n";
}

FrequencyTable table_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid frequency table JSON: ") + e.what());
  }
  FrequencyTable table;
  try {
    j.at("timepoints").get_to(table.timepoints);
    j.at("variant_ids").get_to(table.variant_ids);
    j.at("counts").get_to(table.counts);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid frequency table JSON: ") + e.what());
  }
  validate_table(table);
  return table;
}

FrequencyTable load_table(const std::string& path) {
  const std::string text = read_text_file(path);
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    return table_from_json_text(text);
  }
  return table_from_csv(text);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw InputError("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace freqbias
