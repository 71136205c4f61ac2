#include "freqbias/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "freqbias/errors.hpp"

namespace freqbias {

namespace {

constexpr const char* kEventHeader = "timepoint,variant_id,adopter_id";

}  // namespace

EventLog parse_events(const std::string& text) {
  EventLog log;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == kEventHeader) continue;

    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw InputError("expected 3 fields, line " + std::to_string(line_no));
    }
    const std::string tp_field = line.substr(0, c1);
    AdoptionEvent ev;
    ev.variant_id = line.substr(c1 + 1, c2 - c1 - 1);
    ev.adopter_id = line.substr(c2 + 1);

    const char* first = tp_field.data();
    const char* last = first + tp_field.size();
    const auto [ptr, ec] = std::from_chars(first, last, ev.timepoint);
    if (ec != std::errc{} || ptr != last) {
      throw InputError("non-integer timepoint, line " + std::to_string(line_no));
    }
    if (ev.variant_id.empty()) {
      throw InputError("empty variant_id, line " + std::to_string(line_no));
    }
    if (ev.adopter_id.empty()) {
      throw InputError("empty adopter_id, line " + std::to_string(line_no));
    }
    log.events.push_back(std::move(ev));
  }
  if (log.events.empty()) throw InputError("event file contains no records");
  log.timepoint_range.lo = log.events.front().timepoint;
  log.timepoint_range.hi = log.events.front().timepoint;
  for (const auto& ev : log.events) {
    log.timepoint_range.lo = std::min(log.timepoint_range.lo, ev.timepoint);
    log.timepoint_range.hi = std::max(log.timepoint_range.hi, ev.timepoint);
  }
  return log;
}

std::string serialize_events(const EventLog& log) {
  std::ostringstream out;
  out << kEventHeader << '\n';
  for (const auto& ev : log.events) {
    out << ev.timepoint << ',' << ev.variant_id << ',' << ev.adopter_id << '\n';
  }
  return out.str();
}

FrequencyTable build_frequency_table(const EventLog& log, TimeRange range) {
  if (range.lo > range.hi) {
    throw InputError("empty range [" + std::to_string(range.lo) + ", " +
                     std::to_string(range.hi) + "]");
  }
  // variant -> timepoint -> count, with map keys giving the sorted column order
  std::map<std::string, std::map<int, std::int64_t>> tally;
  std::size_t retained = 0;
  for (const auto& ev : log.events) {
    if (ev.timepoint < range.lo || ev.timepoint > range.hi) continue;
    ++tally[ev.variant_id][ev.timepoint];
    ++retained;
  }
  if (retained == 0) throw InputError("zero events retained");

  FrequencyTable table;
  const std::size_t n_rows = static_cast<std::size_t>(range.hi - range.lo) + 1;
  table.timepoints.reserve(n_rows);
  for (int t = range.lo; t <= range.hi; ++t) table.timepoints.push_back(t);
  table.variant_ids.reserve(tally.size());
  for (const auto& [id, _] : tally) table.variant_ids.push_back(id);
  table.counts.assign(n_rows, std::vector<std::int64_t>(tally.size(), 0));
  std::size_t col = 0;
  for (const auto& [id, by_time] : tally) {
    for (const auto& [t, c] : by_time) {
      table.counts[static_cast<std::size_t>(t - range.lo)][col] = c;
    }
    ++col;
  }
  return table;
}

int estimate_population_size(const EventLog& log, TimeRange range) {
  if (range.lo > range.hi) {
    throw InputError("empty range [" + std::to_string(range.lo) + ", " +
                     std::to_string(range.hi) + "]");
  }
  std::map<int, std::set<std::string>> adopters;
  for (const auto& ev : log.events) {
    if (ev.timepoint < range.lo || ev.timepoint > range.hi) continue;
    adopters[ev.timepoint].insert(ev.adopter_id);
  }
  double sum = 0;
  for (int t = range.lo; t <= range.hi; ++t) {
    const auto it = adopters.find(t);
    if (it == adopters.end()) {
      throw InputError("no events at timepoint " + std::to_string(t));
    }
    sum += static_cast<double>(it->second.size());
  }
  const double mean = sum / static_cast<double>(range.hi - range.lo + 1);
  return static_cast<int>(std::llround(mean));
}

double estimate_innovation_rate(const FrequencyTable& table) {
  validate_table(table);
  if (table.n_timepoints() < 2) {
    throw InputError("innovation rate needs at least 2 timepoints, got " +
                     std::to_string(table.n_timepoints()));
  }
  const std::size_t T = table.n_timepoints();
  const std::size_t V = table.n_variants();

  std::vector<std::size_t> first_seen(V, T);
  for (std::size_t t = 0; t < T; ++t) {
    std::int64_t tokens = 0;
    for (std::size_t v = 0; v < V; ++v) {
      tokens += table.counts[t][v];
      if (table.counts[t][v] > 0 && first_seen[v] == T) first_seen[v] = t;
    }
    if (tokens == 0) {
      throw InputError("zero row sum at timepoint " + std::to_string(table.timepoints[t]));
    }
  }

  double sum = 0;
  for (std::size_t t = 1; t < T; ++t) {
    std::int64_t tokens = 0;
    for (std::size_t v = 0; v < V; ++v) tokens += table.counts[t][v];
    std::int64_t fresh = 0;
    for (std::size_t v = 0; v < V; ++v) {
      if (first_seen[v] == t) ++fresh;
    }
    sum += static_cast<double>(fresh) / static_cast<double>(tokens);
  }
  // The first timepoint is excluded: every variant there is trivially new.
  return sum / static_cast<double>(T - 1);
}

}  // namespace freqbias
