#pragma once

// File formats:
//   FinSeq CSV       rows `index,value`
//   PeriodicSeq CSV  header `# period=N`, then one `value` per line
//   Curve CSV        header `# closed=true|false`, then rows `x,y`
//   Mask dump CSV    rows `k,index,tap`
//   Filter CSV       rows `index,zeta,gamma_raw`, metadata as JSON
//   Pyramid JSON     {family, epsilon, boundary, components, coarse, details, level_params}
// Doubles are written with round-trip precision.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "nsp/decimation.hpp"
#include "nsp/geometry.hpp"
#include "nsp/pyramid.hpp"
#include "nsp/sequence.hpp"
#include "nsp/subdivision.hpp"

namespace nsp::io {

using Json = nlohmann::ordered_json;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// Sequences
FinSeq<double> parse_fin_seq_csv(std::istream& in);
PeriodicSeq<double> parse_periodic_csv(std::istream& in);
void write_csv(std::ostream& out, const FinSeq<double>& c);
void write_csv(std::ostream& out, const PeriodicSeq<double>& c);

// Curves
PlanarCurve parse_curve_csv(std::istream& in);
void write_csv(std::ostream& out, const PlanarCurve& curve);

/// What kind of data a CSV file holds, judged from its first header line.
enum class CsvKind { FiniteSequence, PeriodicSequence, Curve };
CsvKind sniff_csv(const std::string& text);

// Masks and filters
void write_mask_dump(std::ostream& out, const std::vector<Mask<double>>& masks);
void write_filter_csv(std::ostream& out, const DecimationFilter<double>& f);
Json filter_metadata(const DecimationFilter<double>& f);

// Families
Json to_json(const SchemeFamily& family);
SchemeFamily family_from_json(const Json& j);

// Pyramids
using AnyPyramid = std::variant<Pyramid<FinSeq<double>>, Pyramid<PeriodicSeq<double>>>;

Json to_json(const Pyramid<FinSeq<double>>& p);
Json to_json(const Pyramid<PeriodicSeq<double>>& p);
AnyPyramid pyramid_from_json(const Json& j);

// Reports
Json to_json(const CircularityReport& r);
Json to_json(const std::vector<AnomalyRange>& ranges);
void write_detail_norms_csv(std::ostream& out, const std::vector<LevelStats>& stats);

}  // namespace nsp::io
