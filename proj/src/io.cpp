#include "nose/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace nose {
namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line, const char* what) {
  if (s.empty()) throw ParseError(line, std::string("empty ") + what);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError(line, std::string("cannot parse ") + what + " '" + s + "'");
  }
  if (used != s.size()) throw ParseError(line, std::string("trailing characters in ") + what + " '" + s + "'");
  if (!std::isfinite(v)) throw ParseError(line, std::string("non-finite ") + what);
  return v;
}

Json vec_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json rates_json(const AcceptanceRates& r) {
  return Json{{"birth", r.birth.rate()},
              {"death", r.death.rate()},
              {"height", r.height.rate()},
              {"location", r.location.rate()}};
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

}  // namespace

TimeSeries parse_csv(std::istream& in, ScenarioKind kind) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    header = split_fields(line);
    break;
  }
  if (header.empty()) throw ParseError(0, "empty CSV input");
  for (auto& h : header) std::transform(h.begin(), h.end(), h.begin(), [](unsigned char c) { return std::tolower(c); });
  const bool with_x = header.size() == 3 && header[2] == "x";
  if (header.size() < 2 || header[0] != "t" || header[1] != "y" || (header.size() == 3 && !with_x) || header.size() > 3)
    throw ParseError(lineno, "expected header 't,y' or 't,y,x'");
  if (kind == ScenarioKind::LinReg && !with_x) throw ParseError(lineno, "linear-regression input needs an x column");

  std::vector<long> t;
  std::vector<double> y, x;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != header.size())
      throw ParseError(lineno, "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
    const double tv = parse_number(f[0], lineno, "t");
    if (tv != std::floor(tv)) throw ParseError(lineno, "t must be an integer");
    const long ti = static_cast<long>(tv);
    const bool grouped = kind == ScenarioKind::LinReg;
    if (!t.empty() && (grouped ? ti < t.back() : ti <= t.back()))
      throw ParseError(lineno, grouped ? "t must be non-decreasing" : "t must be strictly increasing");
    const double yv = parse_number(f[1], lineno, "y");
    if (kind == ScenarioKind::PoissonRate && (yv < 0.0 || yv != std::floor(yv)))
      throw ParseError(lineno, "Poisson counts must be non-negative integers");
    t.push_back(ti);
    y.push_back(yv);
    if (with_x) x.push_back(parse_number(f[2], lineno, "x"));
  }
  if (t.empty()) throw ParseError(lineno, "no data rows");
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  Eigen::VectorXd xv;
  if (kind == ScenarioKind::LinReg) xv = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  TimeSeries ts = TimeSeries::from_groups(t, yv, xv);
  try {
    validate(ts, kind);
  } catch (const Error& e) {
    throw ParseError(0, e.what());
  }
  return ts;
}

TimeSeries read_csv(const std::string& path, ScenarioKind kind) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return parse_csv(in, kind);
}

void write_csv(std::ostream& out, const TimeSeries& data) {
  const bool with_x = data.has_covariate();
  out << (with_x ? "t,y,x\n" : "t,y\n");
  std::ostringstream row;
  row << std::setprecision(17);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index k = data.begin(i); k < data.end(i); ++k) {
      row.str("");
      row << data.states[static_cast<std::size_t>(i)] << ',' << data.y[k];
      if (with_x) row << ',' << data.x[k];
      out << row.str() << '\n';
    }
  }
}

Json to_json(const DetectionResult& r) {
  Json segs = Json::array();
  for (const Segment& s : r.segments) {
    segs.push_back(Json{{"first_state", s.first_state},
                        {"last_state", s.last_state},
                        {"observations", s.observations},
                        {"level", s.level},
                        {"mean", s.mean},
                        {"sd", s.sd},
                        {"coefficient", std::isfinite(s.coefficient) ? Json(s.coefficient) : Json(nullptr)}});
  }
  return Json{{"changepoints", r.changepoints},
              {"khat", r.khat()},
              {"map_curve", vec_json(r.map_curve)},
              {"zeta", vec_json(r.zeta)},
              {"sigma_trimmed", r.sigma_trimmed},
              {"candidates", r.candidates},
              {"segments", segs}};
}

Json to_json(const DetectionResult& r, const PosteriorDraws& draws) {
  Json j = to_json(r);
  Json acc = Json::array();
  for (const AcceptanceRates& a : draws.meta.acceptance) acc.push_back(rates_json(a));
  Json diag{{"chains", draws.meta.chains},
            {"iterations", draws.meta.iterations},
            {"burn_in", draws.meta.burn_in},
            {"thin", draws.meta.thin},
            {"seed", draws.meta.seed},
            {"retained_per_chain", draws.meta.per_chain},
            {"acceptance", acc}};
  if (draws.meta.chains >= 2 && draws.meta.per_chain >= 4) {
    std::vector<double> rh;
    for (Eigen::Index i = 0; i < draws.theta.cols(); ++i) {
      const double v = split_rhat(chain_columns(draws, i));
      if (std::isfinite(v)) rh.push_back(v);
    }
    if (!rh.empty()) {
      std::sort(rh.begin(), rh.end());
      diag["split_rhat"] = Json{{"median", rh[rh.size() / 2]}, {"max", rh.back()}};
    }
  }
  j["diagnostics"] = diag;
  return j;
}

Json to_json(const GroundTruth& t) {
  Json j{{"n", t.n},
         {"scenario", std::string(to_string(t.kind))},
         {"K", t.K()},
         {"changepoints", t.changepoints},
         {"segment_values", t.segment_values}};
  if (!t.segment_means.empty()) j["segment_means"] = t.segment_means;
  return j;
}

Json to_json(const BenchmarkReport& r) {
  Json per = Json::array();
  for (const ReplicateOutcome& o : r.per_replicate) {
    Json e{{"replicate", o.replicate}, {"seed", o.seed}, {"ok", o.ok}};
    if (o.ok) {
      e["khat"] = o.khat;
      e["K"] = o.k;
      e["precision"] = o.precision;
      e["recall"] = o.recall;
      e["hausdorff"] = o.hausdorff;
      e["changepoints"] = o.changepoints;
      e["candidates"] = o.candidates;
    } else {
      e["error"] = o.error;
    }
    per.push_back(e);
  }
  Json table{{"<=-3", r.khat_table[0]}, {"-2", r.khat_table[1]}, {"-1", r.khat_table[2]}, {"0", r.khat_table[3]},
             {"+1", r.khat_table[4]},   {"+2", r.khat_table[5]}, {">=+3", r.khat_table[6]}};
  return Json{{"setting", r.setting},     {"replicates", r.replicates}, {"failures", r.failures},
              {"window", r.window},       {"khat_table", table},        {"precision", r.precision},
              {"recall", r.recall},       {"hausdorff_mean", r.hausdorff_mean}, {"per_replicate", per}};
}

GroundTruth truth_from_json(const Json& j) {
  try {
    GroundTruth t;
    t.n = j.at("n").get<long>();
    t.kind = parse_scenario(j.at("scenario").get<std::string>());
    t.changepoints = j.at("changepoints").get<std::vector<long>>();
    t.segment_values = j.at("segment_values").get<std::vector<double>>();
    if (j.contains("segment_means")) t.segment_means = j.at("segment_means").get<std::vector<double>>();
    return t;
  } catch (const Json::exception& e) {
    throw ParseError(0, std::string("invalid ground-truth JSON: ") + e.what());
  }
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(0, std::string("malformed JSON: ") + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

PlotInput plot_input_from_json(const Json& j) {
  try {
    PlotInput p;
    p.map_curve = j.at("map_curve").get<std::vector<double>>();
    p.changepoints = j.at("changepoints").get<std::vector<long>>();
    if (p.map_curve.empty()) throw ParseError(0, "map_curve is empty");
    return p;
  } catch (const Json::exception& e) {
    throw ParseError(0, std::string("detection JSON lacks map_curve/changepoints: ") + e.what());
  }
}

std::string render_svg(const PlotInput& plot, const std::optional<TimeSeries>& data, int width, int height) {
  const auto n = static_cast<long>(plot.map_curve.size());
  const double margin = 30.0;
  double lo = *std::min_element(plot.map_curve.begin(), plot.map_curve.end());
  double hi = *std::max_element(plot.map_curve.begin(), plot.map_curve.end());
  if (data) {
    lo = std::min(lo, data->y.minCoeff());
    hi = std::max(hi, data->y.maxCoeff());
  }
  if (hi <= lo) {
    lo -= 1.0;
    hi += 1.0;
  }
  auto sx = [&](double t) { return margin + (t - 0.5) / static_cast<double>(n) * (width - 2 * margin); };
  auto sy = [&](double v) { return height - margin - (v - lo) / (hi - lo) * (height - 2 * margin); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (data) {
    svg << "<g fill=\"#555\" fill-opacity=\"0.6\">\n";
    for (Eigen::Index i = 0; i < data->size() && i < n; ++i)
      for (Eigen::Index k = data->begin(i); k < data->end(i); ++k)
        svg << "<circle cx=\"" << fmt(sx(static_cast<double>(i + 1))) << "\" cy=\"" << fmt(sy(data->y[k]))
            << "\" r=\"1.5\"/>\n";
    svg << "</g>\n";
  }
  svg << "<g stroke=\"#1f5fbf\" stroke-width=\"1\" stroke-dasharray=\"4 3\">\n";
  for (long c : plot.changepoints) {
    const double x = sx(static_cast<double>(c) + 0.5);
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(margin) << "\" x2=\"" << fmt(x) << "\" y2=\""
        << fmt(height - margin) << "\"/>\n";
  }
  svg << "</g>\n";
  // Step curve: state i covers [i - 0.5, i + 0.5); vertices only where the level changes.
  svg << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\"";
  svg << fmt(sx(0.5)) << ',' << fmt(sy(plot.map_curve[0]));
  for (long i = 1; i < n; ++i) {
    if (plot.map_curve[static_cast<std::size_t>(i)] == plot.map_curve[static_cast<std::size_t>(i - 1)]) continue;
    const double x = sx(static_cast<double>(i) + 0.5);
    svg << ' ' << fmt(x) << ',' << fmt(sy(plot.map_curve[static_cast<std::size_t>(i - 1)]));
    svg << ' ' << fmt(x) << ',' << fmt(sy(plot.map_curve[static_cast<std::size_t>(i)]));
  }
  svg << ' ' << fmt(sx(static_cast<double>(n) + 0.5)) << ',' << fmt(sy(plot.map_curve.back()));
  svg << "\"/>\n</svg>\n";
  return svg.str();
}

}  // namespace nose
