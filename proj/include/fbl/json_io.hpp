#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace fbl {

using Json = nlohmann::json;

// Compact JSON with sorted keys and every floating-point number printed with
// 17 significant digits, so that equal values always produce equal bytes.
std::string dump_canonical(const Json& j);

// Formats one double the way dump_canonical does.
std::string format_number(double v);

Json to_json(const Eigen::VectorXd& v);
Json to_json(const std::vector<Eigen::VectorXd>& vs);

// Reads a numeric array; `where` is used to annotate error messages.
Eigen::VectorXd vector_from_json(const Json& j, const std::string& where);
std::vector<Eigen::VectorXd> vectors_from_json(const Json& j, const std::string& where);

Json parse_json_text(const std::string& text, const std::string& source);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace fbl
