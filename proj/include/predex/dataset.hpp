#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace predex {

enum class FeatureKind { categorical, numeric, datetime };
enum class FeatureRole { target, context };

const char* to_string(FeatureKind kind);
const char* to_string(FeatureRole role);
FeatureKind feature_kind_from_string(std::string_view text);
FeatureRole feature_role_from_string(std::string_view text);

inline constexpr std::size_t default_bin_count = 20;
inline constexpr std::size_t default_max_categorical_cardinality = 1000;

struct FeatureSchema {
    std::string name;
    FeatureKind kind = FeatureKind::categorical;
    FeatureRole role = FeatureRole::context;
    /// b_i: distinct observed values for categorical features, bin count otherwise.
    std::size_t bin_count = 1;

    friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

/// One feature's values. Numeric and datetime cells live in `values` (datetime as epoch seconds,
/// NaN marks missing). Categorical cells are codes into a sorted dictionary, -1 marks missing.
struct Column {
    FeatureKind kind = FeatureKind::categorical;
    std::vector<double> values;
    std::vector<std::int32_t> codes;
    std::vector<std::string> dictionary;

    std::size_t size() const { return kind == FeatureKind::categorical ? codes.size() : values.size(); }
    bool is_missing(std::size_t row) const;
    std::optional<std::int32_t> code_of(std::string_view value) const;
};

/// Immutable columnar table. Copies share column storage.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<FeatureSchema> schema, std::vector<std::shared_ptr<const Column>> columns);

    std::size_t row_count() const noexcept { return rows_; }
    std::size_t feature_count() const noexcept { return schema_.size(); }
    const std::vector<FeatureSchema>& schema() const noexcept { return schema_; }
    const FeatureSchema& feature(std::size_t index) const { return schema_.at(index); }
    const Column& column(std::size_t index) const { return *columns_.at(index); }

    std::optional<std::size_t> find(std::string_view name) const;
    /// Throws a schema error for unknown names.
    std::size_t index_of(std::string_view name) const;

    std::vector<std::size_t> context_features() const;
    std::vector<std::size_t> target_features() const;

    /// Display text of a cell; empty for missing.
    std::string cell_text(std::size_t row, std::size_t feature) const;

    Dataset with_schema(std::vector<FeatureSchema> schema) const;

private:
    std::vector<FeatureSchema> schema_;
    std::vector<std::shared_ptr<const Column>> columns_;
    std::size_t rows_ = 0;
};

struct SchemaHint {
    std::optional<FeatureKind> kind;
    std::optional<FeatureRole> role;
};
using SchemaHints = std::map<std::string, SchemaHint, std::less<>>;

/// Hints document: `{"feature": {"kind": "numeric", "role": "target"}, ...}`.
SchemaHints schema_hints_from_json(const nlohmann::json& doc);
SchemaHints load_schema_hints(const std::filesystem::path& path);

/// Empty cells and `NA` / `null` in any case.
bool is_missing_token(std::string_view cell);

Dataset read_csv(std::string_view text, const SchemaHints& hints = {});
Dataset load_csv(const std::filesystem::path& path, const SchemaHints& hints = {});

/// Marks `targets` as target features and every other feature as context.
Dataset set_roles(const Dataset& ds, std::span<const std::string> targets);

struct BinningSpec {
    std::size_t bin_count = default_bin_count;
    std::map<std::string, std::size_t, std::less<>> overrides;
    std::size_t max_categorical_cardinality = default_max_categorical_cardinality;

    std::size_t bins_for(std::string_view feature) const;
};

/// Bins of one feature. Numeric/datetime bins are [edges[i], edges[i+1]) with the last one closed;
/// a constant column has the single degenerate bin [v, v]. Categorical bins are dictionary codes.
struct FeatureBins {
    std::size_t feature = 0;
    FeatureKind kind = FeatureKind::categorical;
    std::vector<double> edges;
    std::vector<std::string> values;

    std::size_t size() const { return kind == FeatureKind::categorical ? values.size() : edges.size() - 1; }
    bool degenerate() const { return kind != FeatureKind::categorical && edges.size() == 2 && edges[0] == edges[1]; }
    /// Bin of a non-missing numeric value inside the observed range.
    std::optional<std::size_t> bin_of(double value) const;
};

struct BinTable {
    std::vector<FeatureBins> features;
    std::vector<std::string> warnings;

    const FeatureBins* find(std::size_t feature) const;
};

/// Bins every context feature. Features with no observed values, and categorical features above
/// the cardinality cap, are left out with a warning.
BinTable discretize(const Dataset& ds, const BinningSpec& spec);

/// Bins a single feature regardless of its role.
std::optional<FeatureBins> discretize_feature(const Dataset& ds, std::size_t feature, std::size_t bin_count);

} // namespace predex
