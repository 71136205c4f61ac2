#pragma once

#include <string>
#include <vector>

#include "freqbias/frequency_table.hpp"

namespace freqbias {

/// One sampling event: an adopter used a variant in a given year.
struct AdoptionEvent {
  int timepoint = 0;
  std::string variant_id;
  std::string adopter_id;
};

/// Inclusive timepoint interval.
struct TimeRange {
  int lo = 0;
  int hi = 0;
};

/// Raw event records in file order plus the observed timepoint range.
struct EventLog {
  std::vector<AdoptionEvent> events;
  TimeRange timepoint_range;
};

/// Empirical simulation parameters recovered from an event log.
struct EmpiricalParams {
  int population_size = 0;   // N
  double innovation_rate = 0;  // mu
};

/// Parses an event CSV: rows `timepoint,variant_id,adopter_id`, with an
/// optional header line matching those column names exactly.  Errors carry
/// the physical line number.  Throws InputError on malformed or empty input.
EventLog parse_events(const std::string& text);

/// Writes the event CSV form read by parse_events, header included.
std::string serialize_events(const EventLog& log);

/// Tallies events into a (timepoint, variant) count matrix over the
/// inclusive `range`.  Events outside the range are dropped; every
/// timepoint in the range becomes a row even if empty; variants with no
/// retained event get no column.  Columns are ordered by variant id.
/// Throws InputError for an empty range or when no event survives.
FrequencyTable build_frequency_table(const EventLog& log, TimeRange range);

/// Mean number of distinct adopters per timepoint over `range`, rounded
/// half-up.  Throws InputError if any timepoint in the range has no events.
int estimate_population_size(const EventLog& log, TimeRange range);

/// Mean over timepoints (excluding the first) of new-variant count divided
/// by total tokens at that timepoint.  "New" means the variant's first
/// nonzero count in the whole table occurs there.  Throws InputError for
/// fewer than two timepoints or a zero row sum.
double estimate_innovation_rate(const FrequencyTable& table);

}  // namespace freqbias
