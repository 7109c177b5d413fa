#include "scissortruss/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace scissortruss {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool needs_quotes(std::string_view field) {
  return field.find_first_of(",\"\n\r") != std::string_view::npos;
}

std::optional<double> optional_number(const std::string& field, const std::string& what) {
  if (trim(field).empty()) return std::nullopt;
  const auto v = parse_number(field);
  if (!v) throw IoError(fmt::format("{}: '{}' is not a number", what, field));
  return v;
}

double required_number(const std::string& field, const std::string& what) {
  const auto v = optional_number(field, what);
  if (!v) throw IoError(fmt::format("{}: value missing", what));
  return *v;
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw IoError(fmt::format("missing column '{}'", name));
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  int line = 1;

  const auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_record = [&] {
    end_field();
    // A blank line is not a record.
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started) throw IoError(fmt::format("line {}: stray quote inside field", line));
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (quoted) throw IoError(fmt::format("line {}: unterminated quoted field", line));
  if (field_started || !record.empty()) end_record();

  CsvTable table;
  if (records.empty()) throw IoError("CSV has no header");
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw IoError(fmt::format("record {}: {} fields, header has {}", r + 1, records[r].size(),
                                table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  const auto emit = [&out](const std::vector<std::string>& rec) {
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (i) out.push_back(',');
      if (needs_quotes(rec[i])) {
        out.push_back('"');
        for (char ch : rec[i]) {
          if (ch == '"') out.push_back('"');
          out.push_back(ch);
        }
        out.push_back('"');
      } else {
        out += rec[i];
      }
    }
    out.push_back('\n');
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

CsvTable read_csv(const std::filesystem::path& path) {
  try {
    return parse_csv(read_text(path));
  } catch (const IoError& e) {
    throw IoError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  write_text(path, to_csv(table));
}

std::string csv_number(double value) { return fmt::format("{:.6g}", value); }

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::vector<MaterialRecord> load_materials(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t name = t.column("material");
  const std::size_t modulus = t.column("youngs_modulus_gpa");
  const std::size_t density = t.column("density_g_cm3");
  const std::size_t poisson = t.column("poissons_ratio");
  const std::size_t cte = t.column("cte_um_m_c");
  const std::size_t yield = t.column("yield_strength_mpa");
  const std::size_t tensile = t.column("tensile_strength_mpa");
  const std::size_t ultimate = t.column("ultimate_strength_mpa");
  const std::size_t elastic = t.column("elastic_limit_mpa");
  const std::size_t breaking = t.column("breaking_strength_mpa");
  const std::size_t mode = t.column("failure_mode");
  const std::size_t t_max = t.column("max_temperature_c");
  const std::size_t t_min = t.column("min_temperature_c");

  std::vector<MaterialRecord> db;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = fmt::format("{} row {}", path.filename().string(), r + 2);
    MaterialRecord m;
    m.name = std::string(trim(row[name]));
    if (m.name.empty()) throw IoError(where + ": material name missing");
    m.youngs_modulus = required_number(row[modulus], where + " youngs_modulus_gpa");
    m.density = required_number(row[density], where + " density_g_cm3");
    m.poissons_ratio = required_number(row[poisson], where + " poissons_ratio");
    m.cte = required_number(row[cte], where + " cte_um_m_c");
    m.yield_strength = required_number(row[yield], where + " yield_strength_mpa");
    m.tensile_strength = required_number(row[tensile], where + " tensile_strength_mpa");
    m.ultimate_strength = required_number(row[ultimate], where + " ultimate_strength_mpa");
    m.elastic_limit = required_number(row[elastic], where + " elastic_limit_mpa");
    m.breaking_strength = required_number(row[breaking], where + " breaking_strength_mpa");
    const std::string_view fm = trim(row[mode]);
    if (fm == "D" || fm == "D." || fm == "ductile") {
      m.failure_mode = FailureMode::kDuctile;
    } else if (fm == "B" || fm == "B." || fm == "brittle") {
      m.failure_mode = FailureMode::kBrittle;
    } else {
      throw IoError(fmt::format("{}: failure mode '{}' is not D or B", where, fm));
    }
    m.max_temperature = required_number(row[t_max], where + " max_temperature_c");
    m.min_temperature = optional_number(row[t_min], where + " min_temperature_c");
    try {
      m.validate();
    } catch (const std::invalid_argument& e) {
      throw IoError(fmt::format("{}: {}", where, e.what()));
    }
    db.push_back(std::move(m));
  }
  return db;
}

std::vector<FrequencyReference> load_frequency_references(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t ap = t.column("aperture_m");
  const std::size_t nat = t.column("natural_hz");
  const std::size_t with = t.column("sim_with_links_hz");
  const std::size_t without = t.column("sim_without_links_hz");
  std::vector<FrequencyReference> refs;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = fmt::format("{} row {}", path.filename().string(), r + 2);
    FrequencyReference ref;
    ref.label = std::string(trim(row[ap]));
    // Leading number of labels such as "25m" or "6m(2)".
    std::string_view label = ref.label;
    std::size_t n = 0;
    while (n < label.size() && (std::isdigit(static_cast<unsigned char>(label[n])) || label[n] == '.')) ++n;
    ref.aperture = parse_number(label.substr(0, n));
    ref.natural_text = std::string(trim(row[nat]));
    std::string_view text = ref.natural_text;
    if (text.size() > 2 && text.substr(text.size() - 2) == "Hz") text.remove_suffix(2);
    ref.natural_hz = parse_number(text);
    ref.sim_with_links_hz = optional_number(row[with], where + " sim_with_links_hz");
    ref.sim_without_links_hz = optional_number(row[without], where + " sim_without_links_hz");
    refs.push_back(std::move(ref));
  }
  return refs;
}

std::vector<FrequencyReference> load_antenna_references(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t name = t.column("antenna_name");
  const std::size_t nat = t.column("natural_hz");
  std::vector<FrequencyReference> refs;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    FrequencyReference ref;
    ref.label = std::string(trim(t.rows[r][name]));
    ref.natural_text = std::string(trim(t.rows[r][nat]));
    ref.natural_hz = parse_number(ref.natural_text);
    ref.is_antenna_row = true;
    refs.push_back(std::move(ref));
  }
  return refs;
}

std::vector<DeploymentTimeRecord> load_deployment_times(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t mech = t.column("mechanism");
  const std::size_t ap = t.column("aperture_m");
  const std::size_t units = t.column("unit_count");
  const std::size_t mid = t.column("intermediate_s");
  const std::size_t full = t.column("complete_deployed_s");
  const std::size_t cycle = t.column("complete_cycle_s");
  std::vector<DeploymentTimeRecord> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = fmt::format("{} row {}", path.filename().string(), r + 2);
    DeploymentTimeRecord rec;
    rec.mechanism = std::string(trim(row[mech]));
    rec.aperture = required_number(row[ap], where + " aperture_m");
    rec.unit_count = static_cast<int>(required_number(row[units], where + " unit_count"));
    rec.intermediate_s = optional_number(row[mid], where + " intermediate_s");
    rec.complete_deployed_s = optional_number(row[full], where + " complete_deployed_s");
    rec.complete_cycle_s = optional_number(row[cycle], where + " complete_cycle_s");
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace scissortruss
