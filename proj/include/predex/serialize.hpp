#pragma once

#include <optional>

#include <json.hpp>

#include "predex/bayes.hpp"
#include "predex/search.hpp"

namespace predex {

using Json = nlohmann::ordered_json;

/// Finite reals as numbers; NaN and infinities as null.
Json real_or_null(double v);
Json real_or_null(const std::optional<double>& v);

Json to_json(const Explanation& e);
Explanation explanation_from_json(const Json& j);

/// {explanations: [...], combined: {...} | null, warnings: [...]}
Json to_json(const ExplainResult& r);
ExplainResult explain_result_from_json(const Json& j);

/// Markdown table of explanations.
std::string markdown_summary(const ExplainResult& r);

} // namespace predex
