#ifndef NOSE_IO_HPP
#define NOSE_IO_HPP

#include "json.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nose/detect.hpp"
#include "nose/evalsim.hpp"
#include "nose/sampler.hpp"
#include "nose/scenario.hpp"
#include "nose/signal.hpp"

namespace nose {

using Json = nlohmann::ordered_json;

/// CSV with header `t,y` or `t,y,x`. Rows sharing a t form one state when the
/// scenario allows replicates (LinReg); otherwise t must be strictly increasing.
TimeSeries parse_csv(std::istream& in, ScenarioKind kind);
TimeSeries read_csv(const std::string& path, ScenarioKind kind);
void write_csv(std::ostream& out, const TimeSeries& data);

Json to_json(const DetectionResult& result);
/// Detection output plus sampler diagnostics (acceptance rates, split R-hat summary).
Json to_json(const DetectionResult& result, const PosteriorDraws& draws);
Json to_json(const GroundTruth& truth);
Json to_json(const BenchmarkReport& report);

GroundTruth truth_from_json(const Json& j);

/// Parses a JSON document; malformed text raises ParseError.
Json read_json(const std::string& path);
/// Serializes with 2-space indent and a trailing newline.
std::string dump(const Json& j);

struct PlotInput {
  std::vector<double> map_curve;
  std::vector<long> changepoints;
};
PlotInput plot_input_from_json(const Json& j);

/// SVG with the data points (when given), the MAP step curve as a single
/// polyline and one vertical line per change-point.
std::string render_svg(const PlotInput& plot, const std::optional<TimeSeries>& data, int width = 900,
                       int height = 360);

}  // namespace nose

#endif  // NOSE_IO_HPP
