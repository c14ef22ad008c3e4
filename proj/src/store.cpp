#include "zoea/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "zoea/json_bridge.hpp"

namespace fs = std::filesystem;

namespace zoea {

std::string stored_program_to_json(const StoredProgram& p) {
  Json j = Json::object();
  j["id"] = p.id;
  j["revision"] = p.revision;
  j["created"] = p.created;
  j["updated"] = p.updated;
  j["document"] = Json::parse(document_to_json(p.document));
  if (p.pipeline) {
    j["pipeline"] = Json::parse(pipeline_to_json(*p.pipeline));
    j["pipeline_revision"] = p.pipeline_revision;
  } else {
    j["pipeline"] = nullptr;
  }
  return j.dump(1);
}

StoredProgram stored_program_from_json(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    StoredProgram p;
    p.id = j.at("id").get<std::string>();
    p.revision = j.at("revision").get<std::uint64_t>();
    p.created = j.value("created", 0LL);
    p.updated = j.value("updated", 0LL);
    p.document = document_from_json(j.at("document").dump());
    if (!j.at("pipeline").is_null()) {
      p.pipeline = pipeline_from_json(j["pipeline"].dump());
      p.pipeline_revision = j.at("pipeline_revision").get<std::uint64_t>();
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw StoreError(std::string("malformed program file: ") + e.what());
  } catch (const DocumentError& e) {
    throw StoreError(std::string("bad document: ") + e.what());
  } catch (const CompileError& e) {
    throw StoreError(std::string("bad pipeline: ") + e.what());
  }
}

bool Store::valid_id(std::string_view id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                    c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

Store::Store(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_ / "programs");
  recover();
}

fs::path Store::file_for(std::string_view id) const { return dir_ / "programs" / (std::string(id) + ".json"); }

void Store::recover() {
  std::lock_guard lock(mu_);
  index_.clear();
  unreadable_.clear();
  for (const auto& entry : fs::directory_iterator(dir_ / "programs")) {
    const auto name = entry.path().filename().string();
    if (name.find(".tmp") != std::string::npos) {
      fs::remove(entry.path());
      continue;
    }
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      StoredProgram p = stored_program_from_json(buf.str());
      if (p.id != entry.path().stem().string()) throw StoreError("file name does not match program id");
      index_[p.id] = p.revision;
    } catch (const StoreError&) {
      unreadable_.push_back(entry.path());
    }
  }
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.path().filename().string().find(".tmp") != std::string::npos) fs::remove(entry.path());
  }
  write_index();
}

std::vector<std::string> Store::ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, rev] : index_) out.push_back(id);
  return out;
}

std::optional<StoredProgram> Store::load(std::string_view id) const {
  if (!valid_id(id)) return std::nullopt;
  std::lock_guard lock(mu_);
  if (!index_.count(std::string(id))) return std::nullopt;
  std::ifstream in(file_for(id), std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  return stored_program_from_json(buf.str());
}

void Store::save(const StoredProgram& p) {
  if (!valid_id(p.id)) throw StoreError("invalid program id '" + p.id + "'");
  const std::string content = stored_program_to_json(p);
  std::lock_guard lock(mu_);
  write_atomic(file_for(p.id), content);
  index_[p.id] = p.revision;
  write_index();
}

void Store::remove(std::string_view id) {
  std::lock_guard lock(mu_);
  fs::remove(file_for(id));
  index_.erase(std::string(id));
  write_index();
}

void Store::set_fault_hook(FaultHook hook) {
  std::lock_guard lock(mu_);
  hook_ = std::move(hook);
}

void Store::write_index() {
  Json j = Json::object();
  Json programs = Json::object();
  for (const auto& [id, rev] : index_) programs[id] = rev;
  j["programs"] = std::move(programs);
  write_atomic(dir_ / "index.json", j.dump(1));
}

namespace {

void write_all(int fd, const char* data, std::size_t n, const fs::path& path) {
  while (n > 0) {
    const ssize_t w = ::write(fd, data, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw StoreError("write failed for " + path.string() + ": " + std::strerror(errno));
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
}

}  // namespace

void Store::write_atomic(const fs::path& target, const std::string& content) {
  const fs::path tmp = target.string() + ".tmp" + std::to_string(::getpid()) + "." + std::to_string(++tmp_counter_);
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) throw StoreError("cannot create " + tmp.string() + ": " + std::strerror(errno));
  try {
    const std::size_t half = content.size() / 2;
    write_all(fd, content.data(), half, tmp);
    if (hook_) hook_("partial", target);
    write_all(fd, content.data() + half, content.size() - half, tmp);
    if (::fsync(fd) != 0) throw StoreError("fsync failed for " + tmp.string());
  } catch (...) {
    ::close(fd);
    throw;  // the temp file stays behind, as after a real crash
  }
  ::close(fd);
  if (hook_) hook_("rename", target);
  fs::rename(tmp, target);
}

}  // namespace zoea
