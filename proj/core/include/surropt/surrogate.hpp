#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace surropt {

enum class LearnerKind { kRidge, kGbdt, kSvr };

std::string_view to_string(LearnerKind kind);
std::optional<LearnerKind> parse_learner_kind(std::string_view name);

/// Little-endian binary stream helpers for model payloads.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i32(std::int32_t v);
  void f64(double v);
  void f64s(std::span<const double> v);
  void bytes(std::string_view s);

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}
  std::uint32_t u32();
  std::uint64_t u64();
  std::int32_t i32();
  double f64();
  void f64s(std::span<double> out);
  std::string bytes(std::size_t n);
  /// Reads a u64 count and rejects values above `limit`.
  std::size_t count(std::size_t limit, std::string_view what);

 private:
  void read(char* dst, std::size_t n);
  std::istream& in_;
};

/// A trained multi-output regressor mapping inventory features to raw
/// decision predictions. Immutable after training; safe to share for prediction.
class SurrogateModel {
 public:
  virtual ~SurrogateModel() = default;

  virtual LearnerKind kind() const = 0;
  virtual std::size_t input_size() const = 0;
  virtual std::size_t output_size() const = 0;

  /// Raw real-valued predictions. Throws InputError on a size mismatch or
  /// non-finite input.
  virtual std::vector<double> predict(std::span<const double> x) const = 0;

  /// Kind-specific metadata (hyperparameters, loss) written to the model file.
  virtual nlohmann::json metadata() const = 0;
  virtual void write_payload(BinaryWriter& out) const = 0;

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

 protected:
  void check_input(std::span<const double> x) const;

 private:
  std::string name_;
};

/// Model file layout (all integers little-endian):
///   8 bytes   magic "SRGTMODL"
///   u32       format version (currently 1)
///   u64       metadata length L
///   L bytes   metadata, compact JSON with sorted keys
///   ...       kind-specific payload
inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const SurrogateModel& model, std::ostream& out);
void save_model(const SurrogateModel& model, const std::filesystem::path& path);
std::unique_ptr<SurrogateModel> load_model(std::istream& in);
std::unique_ptr<SurrogateModel> load_model(const std::filesystem::path& path);

/// Metadata block of a model file without decoding the payload.
nlohmann::json read_model_metadata(const std::filesystem::path& path);

}  // namespace surropt
