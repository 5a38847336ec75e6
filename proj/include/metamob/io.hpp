#pragma once

#include <iosfwd>

#include "metamob/network.hpp"
#include "metamob/sim.hpp"
#include "metamob/types.hpp"

namespace metamob {

/// Fixed 17-significant-digit decimal for reals: byte-identical across
/// platforms and enough digits to round-trip any double.
std::string format_real(double v);

std::string json_escape(const std::string& s);

struct ColumnMap {
    std::string agent = "agent";
    std::string t = "t";
    std::string loc = "loc";
};

/// Parse "--map agent=COL,t=COL,loc=COL" values.
ColumnMap parse_column_map(const std::string& spec);

struct EventFile {
    std::vector<MovementEvent> events;
    bool has_meta = false;   // generated files carry a meta header line
    std::string meta_json;   // raw header line when present
};

/// Read NDJSON (one event object per line, optional {"meta":...} header) or
/// headered CSV; the format is sniffed from the first byte. Malformed rows
/// raise DataError naming the 1-based line number.
EventFile read_events(std::istream& in, const ColumnMap& map = {});
EventFile read_events_file(const std::string& path, const ColumnMap& map = {});

/// One canonical event line: {"agent":"a17","t":42,"loc":"L993"}.
std::string event_line(const MovementEvent& ev);

/// Serialized run-metadata header for a simulation output file.
std::string sim_meta_line(const SimConfig& cfg, const SimStats& stats);

void write_events_ndjson(std::ostream& out, const std::string& meta_line,
                         const std::vector<MovementEvent>& events);

/// Stream a simulation to `path`: events spill to a sibling temp file while
/// running, then the final file is written as meta header + events.
SimStats simulate_to_file(const SimConfig& cfg, const std::string& path, unsigned workers = 0);

// Network CSV formats (exact headers fixed by the interface contract):
//   edges: src,dst,weight_events,weight_agents
//   nodes: loc,visitors,events,self_transitions,degree
void write_network_csv(const MobilityNetwork& net, const std::string& edge_path,
                       const std::string& node_path);

/// Rebuild a network from the two CSV tables written by write_network_csv.
MobilityNetwork read_network_csv(const std::string& edge_path, const std::string& node_path,
                                 bool directed);

/// Curve CSV with the fixed header bin_center,value,count.
void write_curve_csv(const std::string& path, const std::vector<double>& centers,
                     const std::vector<double>& values,
                     const std::vector<std::uint64_t>& counts);

std::string csv_escape(const std::string& field);

}  // namespace metamob
