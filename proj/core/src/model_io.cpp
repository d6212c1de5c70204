#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "surropt/errors.hpp"
#include "surropt/gbdt.hpp"
#include "surropt/ridge.hpp"
#include "surropt/surrogate.hpp"
#include "surropt/svr.hpp"

namespace surropt {

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

namespace {
constexpr std::array<char, 8> kMagic = {'S', 'R', 'G', 'T', 'M', 'O', 'D', 'L'};
constexpr std::size_t kMaxMetadataBytes = 1 << 20;
}  // namespace

std::string_view to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kRidge: return "ridge";
    case LearnerKind::kGbdt: return "gbdt";
    case LearnerKind::kSvr: return "svr";
  }
  return "unknown";
}

std::optional<LearnerKind> parse_learner_kind(std::string_view name) {
  if (name == "ridge") return LearnerKind::kRidge;
  if (name == "gbdt") return LearnerKind::kGbdt;
  if (name == "svr") return LearnerKind::kSvr;
  return std::nullopt;
}

void BinaryWriter::u32(std::uint32_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
void BinaryWriter::u64(std::uint64_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
void BinaryWriter::i32(std::int32_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
void BinaryWriter::f64(double v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
void BinaryWriter::f64s(std::span<const double> v) {
  out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
}
void BinaryWriter::bytes(std::string_view s) { out_.write(s.data(), static_cast<std::streamsize>(s.size())); }

void BinaryReader::read(char* dst, std::size_t n) {
  in_.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) throw InputError("model file is truncated");
}

std::uint32_t BinaryReader::u32() {
  std::uint32_t v;
  read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::uint64_t BinaryReader::u64() {
  std::uint64_t v;
  read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::int32_t BinaryReader::i32() {
  std::int32_t v;
  read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
double BinaryReader::f64() {
  double v;
  read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
void BinaryReader::f64s(std::span<double> out) { read(reinterpret_cast<char*>(out.data()), out.size_bytes()); }
std::string BinaryReader::bytes(std::size_t n) {
  std::string s(n, '\0');
  read(s.data(), n);
  return s;
}
std::size_t BinaryReader::count(std::size_t limit, std::string_view what) {
  const auto v = u64();
  if (v > limit) throw InputError("model file declares an implausible " + std::string(what) + " count");
  return static_cast<std::size_t>(v);
}

void SurrogateModel::check_input(std::span<const double> x) const {
  if (x.size() != input_size()) {
    throw InputError("model expects " + std::to_string(input_size()) + " inputs, got " + std::to_string(x.size()));
  }
  for (double v : x)
    if (!std::isfinite(v)) throw InputError("model input contains a non-finite value");
}

void save_model(const SurrogateModel& model, std::ostream& out) {
  nlohmann::json meta = model.metadata();
  meta["kind"] = std::string(to_string(model.kind()));
  meta["name"] = model.name();
  meta["input_size"] = model.input_size();
  meta["output_size"] = model.output_size();
  const std::string text = meta.dump();  // nlohmann::json keeps keys sorted
  BinaryWriter w(out);
  w.bytes(std::string_view(kMagic.data(), kMagic.size()));
  w.u32(kModelFormatVersion);
  w.u64(text.size());
  w.bytes(text);
  model.write_payload(w);
  if (!out) throw IoError("failed to write model");
}

void save_model(const SurrogateModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save_model(model, out);
  out.flush();
  if (!out) throw IoError("failed to write " + path.string());
}

namespace {

nlohmann::json read_header(BinaryReader& r) {
  if (r.bytes(kMagic.size()) != std::string_view(kMagic.data(), kMagic.size()))
    throw InputError("not a surrogate model file (bad magic)");
  const auto version = r.u32();
  if (version != kModelFormatVersion)
    throw InputError("unsupported model format version " + std::to_string(version));
  const auto len = r.count(kMaxMetadataBytes, "metadata byte");
  try {
    return nlohmann::json::parse(r.bytes(len));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model metadata is not valid JSON: ") + e.what());
  }
}

std::ifstream open_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path.string());
  return in;
}

}  // namespace

std::unique_ptr<SurrogateModel> load_model(std::istream& in) {
  BinaryReader r(in);
  const nlohmann::json meta = read_header(r);
  try {
    const auto kind = parse_learner_kind(meta.at("kind").get<std::string>());
    if (!kind) throw InputError("model file has an unknown learner kind");
    std::unique_ptr<SurrogateModel> model;
    switch (*kind) {
      case LearnerKind::kRidge: model = RidgeModel::read_payload(meta, r); break;
      case LearnerKind::kGbdt: model = GbdtModel::read_payload(meta, r); break;
      case LearnerKind::kSvr: model = SvrModel::read_payload(meta, r); break;
    }
    if (model->input_size() != meta.at("input_size").get<std::size_t>() ||
        model->output_size() != meta.at("output_size").get<std::size_t>()) {
      throw InputError("model payload does not match its declared sizes");
    }
    model->set_name(meta.value("name", std::string()));
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model metadata is incomplete: ") + e.what());
  }
}

std::unique_ptr<SurrogateModel> load_model(const std::filesystem::path& path) {
  auto in = open_model(path);
  return load_model(in);
}

nlohmann::json read_model_metadata(const std::filesystem::path& path) {
  auto in = open_model(path);
  BinaryReader r(in);
  return read_header(r);
}

}  // namespace surropt
