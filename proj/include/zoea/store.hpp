#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zoea/compiler.hpp"
#include "zoea/document.hpp"

namespace zoea {

struct StoredProgram {
  std::string id;
  std::uint64_t revision = 0;
  Document document;
  std::optional<Pipeline> pipeline;  // last successful compile
  std::uint64_t pipeline_revision = 0;
  long long created = 0;
  long long updated = 0;
};

std::string stored_program_to_json(const StoredProgram& p);
StoredProgram stored_program_from_json(std::string_view text);

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Called at each step of an atomic write; throwing simulates a crash there.
/// Stages: "partial" (half the bytes written to the temp file) and "rename".
using FaultHook = std::function<void(std::string_view stage, const std::filesystem::path& target)>;

/// One JSON file per program plus an index, written temp-then-rename.
class Store {
 public:
  /// Creates the directory if needed, removes stray temp files and rebuilds
  /// the index from the program files.
  explicit Store(std::filesystem::path dir);

  const std::filesystem::path& directory() const noexcept { return dir_; }

  std::vector<std::string> ids() const;
  std::optional<StoredProgram> load(std::string_view id) const;
  void save(const StoredProgram& p);
  void remove(std::string_view id);

  /// Files that failed to parse while opening (left untouched).
  const std::vector<std::filesystem::path>& unreadable() const noexcept { return unreadable_; }

  void set_fault_hook(FaultHook hook);

  static bool valid_id(std::string_view id);

 private:
  std::filesystem::path file_for(std::string_view id) const;
  void write_atomic(const std::filesystem::path& target, const std::string& content);
  void write_index();
  void recover();

  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::map<std::string, std::uint64_t> index_;  // id -> revision
  std::vector<std::filesystem::path> unreadable_;
  FaultHook hook_;
  std::uint64_t tmp_counter_ = 0;
};

}  // namespace zoea
