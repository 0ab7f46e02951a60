#pragma once

// Serialisation helpers shared by the command-line tool: JSON views of the
// library types, comma-separated tables, SVG plots and atomic file writes.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nplace/neutral_sim.hpp"
#include "nplace/placement.hpp"
#include "nplace/spectrum.hpp"

namespace nplace {

using Json = nlohmann::ordered_json;

/// %.17g, or "nan"/"inf"/"-inf".
[[nodiscard]] std::string format_double(double x);

/// JSON number, or null when x is not finite.
[[nodiscard]] Json json_number(double x);

[[nodiscard]] Json to_json(Complex z);
[[nodiscard]] Json to_json(const NeutralQuasiPoly& qp);
[[nodiscard]] Json to_json(const Rectangle& r);
[[nodiscard]] Json to_json(const DominanceCertificate& c);
[[nodiscard]] Json to_json(const SpectrumReport& r);
[[nodiscard]] Json to_json(const AssignedRoots& roots);
[[nodiscard]] Json to_json(const ControllerDesign& d);
[[nodiscard]] Json to_json(const SpectrumCharacterization& sc);
[[nodiscard]] Json to_json(const ExpEstimate& e);
[[nodiscard]] Json to_json(const RegionLabel& l);
[[nodiscard]] Json to_json(const WitnessBox& b);

/// Comma-separated table with a header row; numbers at %.17g.
[[nodiscard]] std::string csv_table(const std::vector<std::string>& header,
                                    const std::vector<std::vector<double>>& rows);

[[nodiscard]] std::string trajectory_csv(const Trajectory& tr);

struct SvgSeries {
    std::vector<std::pair<double, double>> points;
    std::string colour = "#1f77b4";
    bool line = false;
};

/// Static scatter/line plot. vlines are drawn dashed at the given abscissae.
[[nodiscard]] std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                                   const std::vector<SvgSeries>& series, const std::vector<double>& vlines = {});

/// Writes to a temporary file in the same directory, then renames over path.
void write_atomic(const std::filesystem::path& path, const std::string& content);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);

}  // namespace nplace
