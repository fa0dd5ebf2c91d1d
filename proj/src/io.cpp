#include "vagp/io.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace vagp::io {

const char* version() { return VAGP_VERSION; }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : path_(path) {
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(double x) { return cell(format_double(x)); }

CsvWriter& CsvWriter::cell(long long x) { return cell(std::to_string(x)); }

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (!first_) row_ += ',';
  row_ += s;
  first_ = false;
  return *this;
}

void CsvWriter::end_row() {
  row_ += '\n';
  out_ << row_;
  row_.clear();
  first_ = true;
  if (!out_) throw IoError("write failed: " + path_.string());
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw IoError("close failed: " + path_.string());
}

nlohmann::json to_json(const TransOp& op) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [w, c] : op.terms()) j.push_back({{"word", w}, {"coeff_re", c.real()}, {"coeff_im", c.imag()}});
  return j;
}

TransOp transop_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("operator JSON must be a list of terms");
  TransOp op;
  for (const auto& t : j) op.add(t.at("word").get<std::string>(), {t.at("coeff_re").get<double>(), t.value("coeff_im", 0.0)});
  return op;
}

nlohmann::json to_json(const AnsatzBasis& basis) {
  return {{"k", basis.k}, {"parity_filter", basis.parity_filter}, {"words", basis.words}};
}

nlohmann::json to_json(const VagpSolution& sol) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (std::size_t n = 0; n < sol.basis->size(); ++n) {
    coeffs.push_back({{"word", sol.basis->words[n]}, {"value", sol.coeffs[static_cast<Eigen::Index>(n)]}});
  }
  return {{"h", sol.point.h},   {"g", sol.point.g},         {"k", sol.k()},          {"phi", sol.phi},
          {"coeffs", coeffs}, {"norm_sq", sol.norm_sq}, {"residual", sol.residual}};
}

nlohmann::json to_json(const OptimalDirection& dir) {
  return {{"phi_opt", dir.phi_opt},     {"phi_orth", dir.phi_orth},
          {"norm_opt", dir.norm_opt},   {"norm_orth", dir.norm_orth},
          {"anisotropy", std::isinf(dir.anisotropy) ? nlohmann::json("inf") : nlohmann::json(dir.anisotropy)},
          {"isotropic", dir.isotropic}};
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_metadata(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& config,
                    const nlohmann::json& extra) {
  nlohmann::json meta = {{"command", command}, {"version", version()}, {"config", config}};
  for (const auto& [key, value] : extra.items()) meta[key] = value;
  write_json(dir / "metadata.json", meta);
}

}  // namespace vagp::io
