#include "tsad/io.hpp"

#include <atomic>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

#include "tsad/error.hpp"

namespace tsad {
namespace fs = std::filesystem;

namespace {

std::atomic<unsigned> g_temp_counter{0};

fs::path temp_sibling(const fs::path& path) {
  std::ostringstream name;
  name << "." << path.filename().string() << ".tmp" << g_temp_counter.fetch_add(1);
  return path.parent_path() / name.str();
}

void write_atomic_impl(const fs::path& path, const char* data, std::size_t size) {
  const fs::path tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw DataError("cannot open '" + path.string() + "' for writing");
    }
    out.write(data, static_cast<std::streamsize>(size));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw DataError("write failed for '" + path.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw DataError("cannot rename into '" + path.string() + "': " + ec.message());
  }
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view contents) {
  write_atomic_impl(path, contents.data(), contents.size());
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> contents) {
  write_atomic_impl(path, reinterpret_cast<const char*>(contents.data()), contents.size());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open '" + path.string() + "'");
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::uint8_t> read_binary_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open '" + path.string() + "'");
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace tsad
