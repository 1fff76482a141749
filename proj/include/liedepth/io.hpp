#ifndef LIEDEPTH_IO_HPP
#define LIEDEPTH_IO_HPP

#include "liedepth/cascade.hpp"
#include "liedepth/common.hpp"
#include "liedepth/flows.hpp"
#include "liedepth/groups.hpp"
#include "liedepth/lie_core.hpp"
#include "liedepth/lyndon.hpp"
#include "liedepth/ssm.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace liedepth::io {

using Json = nlohmann::ordered_json;

/// %.16e: 17 significant digits, exact round trip for doubles.
std::string format_double(double v);

/// Deterministic serializer: floats through format_double, keys in
/// insertion order, two-space indent (indent < 0 gives one line).
std::string dump(const Json& j, int indent = 2);

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Matrix matrix_from_json(const Json& j, const std::string& what);
Vector vector_from_json(const Json& j, const std::string& what);

/// Parse errors become ValidationError with the location in the message.
Json parse_json(std::string_view text, const std::string& what);
std::string read_file(const std::string& path);
/// Writes atomically through a temporary next to the target.
void write_file(const std::string& path, std::string_view content);

struct NamedGenerators {
    std::vector<std::string> names;
    std::vector<Matrix> generators;
};

/// {"n": k, "generators": [{"name": .., "rows": [[..]]}, ..]}; an SSM file
/// (object "A") is accepted too.
NamedGenerators parse_algebra(std::string_view text);
std::string algebra_text(const NamedGenerators& g);

/// {"n", "alphabet", "A": {name: rows}, "b": {name: vec}, "h0"}; b and h0 optional.
SSMSpec parse_ssm(std::string_view text);
std::string ssm_text(const SSMSpec& ssm);

/// {"segments": [{"symbol": name-or-index, "duration": d}]}.
PiecewisePath parse_path(std::string_view text, const std::vector<std::string>& alphabet);
std::string path_text(const PiecewisePath& path, const std::vector<std::string>& alphabet);

Json report_json(const AlgebraReport& r);
AlgebraReport report_from_json(const Json& j);

Json sim_error_json(const SimErrorReport& r);
SimErrorReport sim_error_from_json(const Json& j);

Json flow_json(const FlowResult& r);
Json four_path_json(const FourPathReport& r);

/// Per layer: role, peeled column, ideal basis, per-symbol generators,
/// quotient generators and the zeroed section columns.
Json cascade_json(const CascadeDecomposition& d);
CascadeDecomposition cascade_from_json(const Json& j);

/// CSV rows "epsilon,order,error,replicate,depth_equiv" then a "# fit" block.
std::string scaling_csv(const ScalingResult& r);
ScalingResult scaling_from_csv(std::string_view text);

/// One JSON object per line.
std::string word_jsonl(const std::vector<WordRecord>& records);
std::vector<WordRecord> words_from_jsonl(std::string_view text);
std::string rotation_jsonl(const std::vector<RotationRecord>& records);
std::vector<RotationRecord> rotations_from_jsonl(std::string_view text);

/// "n,m,count,cumulative" rows.
std::string lyndon_csv(const std::vector<LyndonTableRow>& rows);
std::vector<LyndonTableRow> lyndon_from_csv(std::string_view text);

WideCount parse_wide(std::string_view s);

}  // namespace liedepth::io

#endif
