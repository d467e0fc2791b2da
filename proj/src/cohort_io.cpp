#include "mtnet/cohort_io.hpp"

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mtnet/errors.hpp"

namespace mtnet {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool found = false;
        for (const char* k : known) {
            if (it.key() == k) {
                found = true;
                break;
            }
        }
        if (!found) throw SchemaError("unknown key '" + it.key() + "' in " + where);
    }
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

void check_field_text(const std::string& text, const std::string& what) {
    if (text.find_first_of(",\n\r\"") != std::string::npos) {
        throw DataError(what + " '" + text + "' contains CSV delimiter characters");
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
        fields.back().pop_back();
    }
    return fields;
}

double parse_double_field(const std::string& text, const std::string& where) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw DataError("cannot parse number '" + text + "' at " + where);
    }
    return value;
}

long parse_int_field(const std::string& text, const std::string& where) {
    long value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw DataError("cannot parse integer '" + text + "' at " + where);
    }
    return value;
}

void write_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_u64(std::ofstream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

constexpr std::uint32_t kEncodedVersion = 1;

}  // namespace

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void save_schema(const CohortSchema& schema, const std::string& path) {
    schema.validate();
    json doc;
    doc["waves"] = schema.waves;
    doc["columns"] = json::array();
    for (const auto& col : schema.columns) {
        json jcol;
        jcol["name"] = col.name;
        jcol["kind"] = (col.kind == ColumnKind::numeric) ? "numeric" : "categorical";
        if (col.kind == ColumnKind::categorical) jcol["categories"] = col.categories;
        doc["columns"].push_back(std::move(jcol));
    }
    auto out = open_out(path);
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("failed writing schema to '" + path + "'");
}

CohortSchema load_schema(const std::string& path) {
    auto in = open_in(path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw SchemaError("schema file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw SchemaError("schema file '" + path + "' must hold a JSON object");
    reject_unknown_keys(doc, {"waves", "columns"}, "schema file");

    CohortSchema schema;
    if (!doc.contains("waves") || !doc["waves"].is_number_integer()) {
        throw SchemaError("schema file needs an integer 'waves'");
    }
    schema.waves = doc["waves"].get<int>();
    if (!doc.contains("columns") || !doc["columns"].is_array()) {
        throw SchemaError("schema file needs a 'columns' array");
    }
    for (const auto& jcol : doc["columns"]) {
        reject_unknown_keys(jcol, {"name", "kind", "categories"}, "schema column");
        ColumnSpec col;
        if (!jcol.contains("name") || !jcol["name"].is_string()) {
            throw SchemaError("schema column needs a string 'name'");
        }
        col.name = jcol["name"].get<std::string>();
        const std::string kind = jcol.value("kind", "");
        if (kind == "numeric") {
            col.kind = ColumnKind::numeric;
        } else if (kind == "categorical") {
            col.kind = ColumnKind::categorical;
            if (!jcol.contains("categories") || !jcol["categories"].is_array()) {
                throw SchemaError("categorical column '" + col.name + "' needs 'categories'");
            }
            for (const auto& c : jcol["categories"]) col.categories.push_back(c.get<std::string>());
        } else {
            throw SchemaError("column '" + col.name + "' has unknown kind '" + kind + "'");
        }
        schema.columns.push_back(std::move(col));
    }
    schema.validate();
    return schema;
}

void save_raw_cohort(const RawCohort& cohort, const CohortSchema& schema,
                     const std::string& csv_path, const std::string& labels_path) {
    cohort.validate_against(schema);
    auto out = open_out(csv_path);
    out << "subject_id,wave";
    for (const auto& col : schema.columns) {
        check_field_text(col.name, "column name");
        out << "," << col.name;
    }
    out << "\n";
    for (int s = 0; s < cohort.n_subjects(); ++s) {
        check_field_text(cohort.subject_ids[s], "subject id");
        for (int t = 0; t < schema.waves; ++t) {
            out << cohort.subject_ids[s] << "," << (t + 1);
            for (std::size_t j = 0; j < schema.columns.size(); ++j) {
                const RawCell& cell = cohort.cells[s][t][j];
                out << ",";
                if (cell.missing) continue;
                if (schema.columns[j].kind == ColumnKind::numeric) {
                    out << format_double(cell.number);
                } else {
                    check_field_text(cell.category, "category value");
                    out << cell.category;
                }
            }
            out << "\n";
        }
    }
    if (!out) throw IoError("failed writing cohort to '" + csv_path + "'");

    auto labels = open_out(labels_path);
    labels << "subject_id,label\n";
    for (int s = 0; s < cohort.n_subjects(); ++s) {
        labels << cohort.subject_ids[s] << "," << cohort.labels[s] << "\n";
    }
    if (!labels) throw IoError("failed writing labels to '" + labels_path + "'");
}

RawCohort load_raw_cohort(const std::string& csv_path, const std::string& labels_path,
                          const CohortSchema& schema) {
    schema.validate();
    auto in = open_in(csv_path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + csv_path + "' is empty");
    {
        auto header = split_csv_line(line);
        std::vector<std::string> expected = {"subject_id", "wave"};
        for (const auto& col : schema.columns) expected.push_back(col.name);
        if (header != expected) {
            throw DataError("'" + csv_path + "' header does not match the schema");
        }
    }

    RawCohort cohort;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        const std::string where = csv_path + ":" + std::to_string(line_no);
        if (fields.size() != schema.columns.size() + 2) {
            std::ostringstream os;
            os << where << ": expected " << schema.columns.size() + 2 << " fields, got "
               << fields.size();
            throw DataError(os.str());
        }
        const std::string& id = fields[0];
        const long wave = parse_int_field(fields[1], where);
        if (cohort.subject_ids.empty() || cohort.subject_ids.back() != id) {
            if (wave != 1) {
                throw DataError(where + ": subject '" + id + "' does not start at wave 1");
            }
            cohort.subject_ids.push_back(id);
            cohort.cells.emplace_back();
        } else if (wave != static_cast<long>(cohort.cells.back().size()) + 1) {
            throw DataError(where + ": waves of subject '" + id + "' are out of order");
        }
        if (wave > schema.waves) {
            throw DataError(where + ": wave " + std::to_string(wave) + " exceeds schema's " +
                            std::to_string(schema.waves));
        }
        std::vector<RawCell> row(schema.columns.size());
        for (std::size_t j = 0; j < schema.columns.size(); ++j) {
            const std::string& text = fields[j + 2];
            if (text.empty()) continue;  // missing marker
            if (schema.columns[j].kind == ColumnKind::numeric) {
                row[j] = RawCell::num(parse_double_field(text, where));
            } else {
                row[j] = RawCell::cat(text);
            }
        }
        cohort.cells.back().push_back(std::move(row));
    }

    {
        std::set<std::string> ids(cohort.subject_ids.begin(), cohort.subject_ids.end());
        if (ids.size() != cohort.subject_ids.size()) {
            throw DataError("'" + csv_path + "' lists a subject id in non-consecutive blocks");
        }
    }

    auto labels_in = open_in(labels_path);
    if (!std::getline(labels_in, line) || split_csv_line(line) !=
                                              std::vector<std::string>{"subject_id", "label"}) {
        throw DataError("'" + labels_path + "' must start with a subject_id,label header");
    }
    std::map<std::string, int> label_by_id;
    line_no = 1;
    while (std::getline(labels_in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        const std::string where = labels_path + ":" + std::to_string(line_no);
        if (fields.size() != 2) throw DataError(where + ": expected subject_id,label");
        const long label = parse_int_field(fields[1], where);
        if (!label_by_id.emplace(fields[0], static_cast<int>(label)).second) {
            throw DataError(where + ": subject '" + fields[0] + "' labeled twice");
        }
    }
    for (const auto& id : cohort.subject_ids) {
        auto it = label_by_id.find(id);
        if (it == label_by_id.end()) {
            throw DataError("subject '" + id + "' has no label in '" + labels_path + "'");
        }
        cohort.labels.push_back(it->second);
    }
    if (label_by_id.size() != cohort.subject_ids.size()) {
        throw DataError("'" + labels_path + "' labels subjects absent from '" + csv_path + "'");
    }

    cohort.validate_against(schema);
    return cohort;
}

void save_archetypes(const std::vector<std::string>& subject_ids,
                     const std::vector<int>& archetype, const std::string& path) {
    if (subject_ids.size() != archetype.size()) {
        throw DataError("archetype list does not match subject count");
    }
    auto out = open_out(path);
    out << "subject_id,archetype\n";
    for (std::size_t s = 0; s < subject_ids.size(); ++s) {
        out << subject_ids[s] << "," << archetype[s] << "\n";
    }
    if (!out) throw IoError("failed writing archetypes to '" + path + "'");
}

void save_encoded(const EncodedCohort& cohort, const std::string& path) {
    cohort.validate();
    json header;
    header["n"] = cohort.n;
    header["waves"] = cohort.waves;
    header["dim"] = cohort.dim;
    header["labels"] = cohort.labels;
    header["feature_names"] = cohort.feature_names;
    const std::string header_text = header.dump();

    auto out = open_out(path, std::ios::out | std::ios::binary);
    out.write("MTEC", 4);
    write_u32(out, kEncodedVersion);
    write_u64(out, header_text.size());
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    out.write(reinterpret_cast<const char*>(cohort.data.data()),
              static_cast<std::streamsize>(cohort.data.size() * sizeof(double)));
    if (!out) throw IoError("failed writing encoded cohort to '" + path + "'");
}

EncodedCohort load_encoded(const std::string& path) {
    auto in = open_in(path, std::ios::in | std::ios::binary);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "MTEC", 4) != 0) {
        throw IoError("'" + path + "' is not an encoded cohort file");
    }
    std::uint32_t version = 0;
    std::uint64_t header_len = 0;
    if (!in.read(reinterpret_cast<char*>(&version), sizeof(version)) ||
        !in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len))) {
        throw IoError("'" + path + "' is truncated");
    }
    if (version != kEncodedVersion) {
        std::ostringstream os;
        os << "'" << path << "' has format version " << version << ", this build reads "
           << kEncodedVersion;
        throw IoError(os.str());
    }
    std::string header_text(header_len, '\0');
    if (!in.read(header_text.data(), static_cast<std::streamsize>(header_len))) {
        throw IoError("'" + path + "' is truncated");
    }
    json header;
    try {
        header = json::parse(header_text);
    } catch (const json::exception& e) {
        throw IoError("'" + path + "' header is corrupt: " + std::string(e.what()));
    }

    EncodedCohort cohort;
    try {
        cohort.n = header.at("n").get<int>();
        cohort.waves = header.at("waves").get<int>();
        cohort.dim = header.at("dim").get<int>();
        cohort.labels = header.at("labels").get<std::vector<int>>();
        cohort.feature_names = header.at("feature_names").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw IoError("'" + path + "' header is corrupt: " + std::string(e.what()));
    }
    if (cohort.n < 0 || cohort.waves < 1 || cohort.dim < 1) {
        throw IoError("'" + path + "' header holds impossible dimensions");
    }
    cohort.data.resize(static_cast<std::size_t>(cohort.n) * cohort.waves * cohort.dim);
    if (!in.read(reinterpret_cast<char*>(cohort.data.data()),
                 static_cast<std::streamsize>(cohort.data.size() * sizeof(double)))) {
        throw IoError("'" + path + "' is truncated");
    }
    in.peek();
    if (!in.eof()) throw IoError("'" + path + "' has trailing bytes after the payload");
    cohort.validate();
    return cohort;
}

}  // namespace mtnet
