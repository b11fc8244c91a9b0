#include "predex/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "predex/datetime.hpp"
#include "predex/error.hpp"
#include "predex/text.hpp"

namespace predex {

const char* to_string(FeatureKind kind) {
    switch (kind) {
    case FeatureKind::categorical: return "categorical";
    case FeatureKind::numeric: return "numeric";
    case FeatureKind::datetime: return "datetime";
    }
    return "categorical";
}

const char* to_string(FeatureRole role) {
    return role == FeatureRole::target ? "target" : "context";
}

FeatureKind feature_kind_from_string(std::string_view text) {
    if (text == "categorical") return FeatureKind::categorical;
    if (text == "numeric") return FeatureKind::numeric;
    if (text == "datetime") return FeatureKind::datetime;
    throw Error(ErrorCode::schema, "unknown feature kind '" + std::string(text) + "'");
}

FeatureRole feature_role_from_string(std::string_view text) {
    if (text == "target") return FeatureRole::target;
    if (text == "context") return FeatureRole::context;
    throw Error(ErrorCode::schema, "unknown feature role '" + std::string(text) + "'");
}

bool Column::is_missing(std::size_t row) const {
    return kind == FeatureKind::categorical ? codes[row] < 0 : std::isnan(values[row]);
}

std::optional<std::int32_t> Column::code_of(std::string_view value) const {
    const auto it = std::lower_bound(dictionary.begin(), dictionary.end(), value);
    if (it == dictionary.end() || *it != value) {
        return std::nullopt;
    }
    return static_cast<std::int32_t>(it - dictionary.begin());
}

Dataset::Dataset(std::vector<FeatureSchema> schema, std::vector<std::shared_ptr<const Column>> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
    if (schema_.size() != columns_.size()) {
        throw Error(ErrorCode::schema, "schema and column counts differ");
    }
    std::set<std::string_view> names;
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (!names.insert(schema_[i].name).second) {
            throw Error(ErrorCode::schema, "duplicate feature name '" + schema_[i].name + "'");
        }
        if (schema_[i].kind != columns_[i]->kind) {
            throw Error(ErrorCode::schema, "feature '" + schema_[i].name + "' kind does not match its column");
        }
        if (schema_[i].bin_count < 1) {
            throw Error(ErrorCode::schema, "feature '" + schema_[i].name + "' has zero bins");
        }
    }
    rows_ = columns_.empty() ? 0 : columns_.front()->size();
    for (const auto& c : columns_) {
        if (c->size() != rows_) {
            throw Error(ErrorCode::schema, "columns differ in length");
        }
    }
}

std::optional<std::size_t> Dataset::find(std::string_view name) const {
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (schema_[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t Dataset::index_of(std::string_view name) const {
    if (auto i = find(name)) {
        return *i;
    }
    throw Error(ErrorCode::schema, "unknown feature '" + std::string(name) + "'");
}

std::vector<std::size_t> Dataset::context_features() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (schema_[i].role == FeatureRole::context) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::size_t> Dataset::target_features() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (schema_[i].role == FeatureRole::target) {
            out.push_back(i);
        }
    }
    return out;
}

std::string Dataset::cell_text(std::size_t row, std::size_t feature) const {
    const Column& c = column(feature);
    if (c.is_missing(row)) {
        return {};
    }
    switch (c.kind) {
    case FeatureKind::categorical: return c.dictionary[static_cast<std::size_t>(c.codes[row])];
    case FeatureKind::datetime: return format_iso8601(static_cast<std::int64_t>(c.values[row]));
    case FeatureKind::numeric: return format_real(c.values[row]);
    }
    return {};
}

Dataset Dataset::with_schema(std::vector<FeatureSchema> schema) const {
    return Dataset(std::move(schema), columns_);
}

SchemaHints schema_hints_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw Error(ErrorCode::schema, "schema hints must be a JSON object");
    }
    SchemaHints hints;
    for (const auto& [name, entry] : doc.items()) {
        if (!entry.is_object()) {
            throw Error(ErrorCode::schema, "schema hint for '" + name + "' must be an object");
        }
        SchemaHint h;
        if (entry.contains("kind")) {
            h.kind = feature_kind_from_string(entry.at("kind").get<std::string>());
        }
        if (entry.contains("role")) {
            h.role = feature_role_from_string(entry.at("role").get<std::string>());
        }
        hints.emplace(name, h);
    }
    return hints;
}

SchemaHints load_schema_hints(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::schema, "cannot open schema hints '" + path.string() + "'");
    }
    try {
        return schema_hints_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::schema, "invalid schema hints: " + std::string(e.what()));
    }
}

bool is_missing_token(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) {
        return true;
    }
    auto iequals = [](std::string_view a, std::string_view b) {
        return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
                   return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
               });
    };
    return iequals(cell, "na") || iequals(cell, "null");
}

namespace {

struct CsvRecord {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

// RFC 4180 records; quoted fields may contain separators, newlines and doubled quotes.
std::vector<CsvRecord> split_records(std::string_view text) {
    std::vector<CsvRecord> records;
    CsvRecord current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    current.line = line;
    std::size_t quote_line = 0;

    auto end_record = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        const bool blank = current.fields.size() == 1 && current.fields[0].empty() && !field_started;
        if (!blank) {
            records.push_back(std::move(current));
        }
        current = CsvRecord{};
        field_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!trim(field).empty()) {
                throw ParseError(line, current.fields.size() + 1, "unexpected quote inside unquoted field");
            }
            field.clear();
            in_quotes = true;
            field_started = true;
            quote_line = line;
            break;
        case ',':
            current.fields.push_back(std::move(field));
            field.clear();
            field_started = true;
            break;
        case '\r':
            break;
        case '\n':
            end_record();
            ++line;
            current.line = line;
            break;
        default:
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) {
        throw ParseError(quote_line, current.fields.size() + 1, "unterminated quoted field");
    }
    if (field_started || !field.empty() || !current.fields.empty()) {
        end_record();
    }
    return records;
}

FeatureKind infer_kind(const std::vector<std::string>& cells) {
    bool numeric = true;
    bool datetime = true;
    bool any = false;
    for (const auto& raw : cells) {
        if (is_missing_token(raw)) {
            continue;
        }
        any = true;
        const auto cell = trim(raw);
        if (numeric && !parse_real(cell)) {
            numeric = false;
        }
        if (datetime && !parse_iso8601(cell)) {
            datetime = false;
        }
        if (!numeric && !datetime) {
            return FeatureKind::categorical;
        }
    }
    if (!any) {
        return FeatureKind::categorical;
    }
    return numeric ? FeatureKind::numeric : FeatureKind::datetime;
}

} // namespace

Dataset read_csv(std::string_view text, const SchemaHints& hints) {
    const auto records = split_records(text);
    if (records.empty()) {
        throw Error(ErrorCode::empty_input, "CSV input is empty");
    }
    const auto& header = records.front().fields;
    const std::size_t width = header.size();
    for (const auto& [name, hint] : hints) {
        if (std::none_of(header.begin(), header.end(), [&](const std::string& h) { return trim(h) == name; })) {
            throw Error(ErrorCode::schema, "schema hint names unknown feature '" + name + "'");
        }
    }

    std::vector<std::vector<std::string>> cells(width);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != width) {
            throw ParseError(rec.line, std::min(rec.fields.size(), width) + 1,
                             "expected " + std::to_string(width) + " fields, found " +
                                 std::to_string(rec.fields.size()));
        }
        for (std::size_t c = 0; c < width; ++c) {
            cells[c].push_back(rec.fields[c]);
        }
    }

    std::vector<FeatureSchema> schema;
    std::vector<std::shared_ptr<const Column>> columns;
    for (std::size_t c = 0; c < width; ++c) {
        FeatureSchema fs;
        fs.name = std::string(trim(header[c]));
        if (fs.name.empty()) {
            throw ParseError(1, c + 1, "empty column name");
        }
        const auto hint = hints.find(fs.name);
        fs.kind = hint != hints.end() && hint->second.kind ? *hint->second.kind : infer_kind(cells[c]);
        fs.role = hint != hints.end() && hint->second.role ? *hint->second.role : FeatureRole::context;

        auto col = std::make_shared<Column>();
        col->kind = fs.kind;
        const auto& raw = cells[c];
        if (fs.kind == FeatureKind::categorical) {
            std::set<std::string> distinct;
            for (const auto& cell : raw) {
                if (!is_missing_token(cell)) {
                    distinct.emplace(trim(cell));
                }
            }
            col->dictionary.assign(distinct.begin(), distinct.end());
            col->codes.reserve(raw.size());
            for (const auto& cell : raw) {
                col->codes.push_back(is_missing_token(cell) ? -1 : *col->code_of(trim(cell)));
            }
            fs.bin_count = std::max<std::size_t>(1, col->dictionary.size());
        } else {
            col->values.reserve(raw.size());
            for (std::size_t r = 0; r < raw.size(); ++r) {
                if (is_missing_token(raw[r])) {
                    col->values.push_back(std::numeric_limits<double>::quiet_NaN());
                    continue;
                }
                const auto cell = trim(raw[r]);
                if (fs.kind == FeatureKind::numeric) {
                    const auto v = parse_real(cell);
                    if (!v) {
                        throw ParseError(records[r + 1].line, c + 1, "'" + std::string(cell) + "' is not a finite number");
                    }
                    col->values.push_back(*v);
                } else {
                    const auto v = parse_iso8601(cell);
                    if (!v) {
                        throw ParseError(records[r + 1].line, c + 1, "'" + std::string(cell) + "' is not an ISO-8601 datetime");
                    }
                    col->values.push_back(static_cast<double>(*v));
                }
            }
            fs.bin_count = default_bin_count;
        }
        schema.push_back(std::move(fs));
        columns.push_back(std::move(col));
    }
    return Dataset(std::move(schema), std::move(columns));
}

Dataset load_csv(const std::filesystem::path& path, const SchemaHints& hints) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::empty_input, "cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_csv(buf.str(), hints);
}

Dataset set_roles(const Dataset& ds, std::span<const std::string> targets) {
    auto schema = ds.schema();
    for (const auto& name : targets) {
        ds.index_of(name);
    }
    for (auto& fs : schema) {
        const bool target = std::find(targets.begin(), targets.end(), fs.name) != targets.end();
        fs.role = target ? FeatureRole::target : FeatureRole::context;
    }
    return ds.with_schema(std::move(schema));
}

std::size_t BinningSpec::bins_for(std::string_view feature) const {
    const auto it = overrides.find(feature);
    return it == overrides.end() ? bin_count : it->second;
}

std::optional<std::size_t> FeatureBins::bin_of(double value) const {
    if (kind == FeatureKind::categorical || std::isnan(value) || value < edges.front() || value > edges.back()) {
        return std::nullopt;
    }
    const auto it = std::upper_bound(edges.begin(), edges.end(), value);
    const auto idx = static_cast<std::size_t>(it - edges.begin());
    return std::min(idx == 0 ? 0 : idx - 1, size() - 1);
}

const FeatureBins* BinTable::find(std::size_t feature) const {
    for (const auto& fb : features) {
        if (fb.feature == feature) {
            return &fb;
        }
    }
    return nullptr;
}

std::optional<FeatureBins> discretize_feature(const Dataset& ds, std::size_t feature, std::size_t bin_count) {
    if (bin_count < 1) {
        throw Error(ErrorCode::configuration, "bin count must be at least 1");
    }
    const Column& col = ds.column(feature);
    FeatureBins fb;
    fb.feature = feature;
    fb.kind = col.kind;
    if (col.kind == FeatureKind::categorical) {
        if (col.dictionary.empty()) {
            return std::nullopt;
        }
        fb.values = col.dictionary;
        return fb;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : col.values) {
        if (!std::isnan(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (lo > hi) {
        return std::nullopt;
    }
    if (lo == hi) {
        fb.edges = {lo, hi};
        return fb;
    }
    const double width = (hi - lo) / static_cast<double>(bin_count);
    fb.edges.push_back(lo);
    for (std::size_t i = 1; i < bin_count; ++i) {
        double e = lo + width * static_cast<double>(i);
        if (col.kind == FeatureKind::datetime) {
            e = std::floor(e);
        }
        if (e > fb.edges.back() && e < hi) {
            fb.edges.push_back(e);
        }
    }
    fb.edges.push_back(hi);
    return fb;
}

BinTable discretize(const Dataset& ds, const BinningSpec& spec) {
    if (ds.row_count() == 0) {
        throw Error(ErrorCode::configuration, "cannot discretize an empty dataset");
    }
    if (spec.bin_count < 1) {
        throw Error(ErrorCode::configuration, "bin count must be at least 1");
    }
    BinTable table;
    for (std::size_t f : ds.context_features()) {
        const auto& fs = ds.feature(f);
        if (fs.kind == FeatureKind::categorical && ds.column(f).dictionary.size() > spec.max_categorical_cardinality) {
            table.warnings.push_back("feature '" + fs.name + "' has " + std::to_string(ds.column(f).dictionary.size()) +
                                     " distinct values, above the cap of " +
                                     std::to_string(spec.max_categorical_cardinality) + "; excluded");
            continue;
        }
        auto fb = discretize_feature(ds, f, spec.bins_for(fs.name));
        if (!fb) {
            table.warnings.push_back("feature '" + fs.name + "' has no observed values; excluded");
            continue;
        }
        table.features.push_back(std::move(*fb));
    }
    return table;
}

} // namespace predex
