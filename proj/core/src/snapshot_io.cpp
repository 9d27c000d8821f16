#include "srom/snapshot_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "srom/errors.hpp"

namespace srom {

namespace {
constexpr char kMagic[4] = {'S', 'R', 'O', 'M'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kDtypeF64 = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 + 8 + 8 + 4;

void write_u32(std::FILE* f, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  if (std::fwrite(b, 1, 4, f) != 4) throw IoError("snapshot io: short write");
}

void write_u64(std::FILE* f, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  if (std::fwrite(b, 1, 8, f) != 8) throw IoError("snapshot io: short write");
}

std::uint32_t read_u32(std::FILE* f) {
  unsigned char b[4];
  if (std::fread(b, 1, 4, f) != 4) throw IoError("snapshot io: short read");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::FILE* f) {
  unsigned char b[8];
  if (std::fread(b, 1, 8, f) != 8) throw IoError("snapshot io: short read");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}
}  // namespace

SnapshotWriter::SnapshotWriter(const std::string& path, Index rows, Index cols)
    : path_(path), rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) throw DimensionMismatch("snapshot writer: empty shape");
  file_ = std::fopen(path.c_str(), "wb");
  if (!file_) throw IoError("snapshot writer: cannot open " + path);
  if (std::fwrite(kMagic, 1, 4, file_) != 4) throw IoError("snapshot writer: short write");
  write_u32(file_, kVersion);
  write_u64(file_, static_cast<std::uint64_t>(rows));
  write_u64(file_, static_cast<std::uint64_t>(cols));
  write_u32(file_, kDtypeF64);
}

SnapshotWriter::~SnapshotWriter() {
  if (file_) std::fclose(file_);
}

void SnapshotWriter::append(ConstVectorRef column) {
  if (finished_) throw IoError("snapshot writer: append after finish");
  if (column.size() != rows_) throw DimensionMismatch("snapshot writer: column length mismatch");
  if (written_ >= cols_) throw IoError("snapshot writer: more columns than declared");
  const Vector contiguous = column;
  const std::size_t n = static_cast<std::size_t>(rows_);
  if (std::fwrite(contiguous.data(), sizeof(double), n, file_) != n)
    throw IoError("snapshot writer: short write");
  ++written_;
}

void SnapshotWriter::finish() {
  if (finished_) return;
  if (written_ != cols_)
    throw IoError("snapshot writer: wrote " + std::to_string(written_) + " of " +
                  std::to_string(cols_) + " columns to " + path_);
  if (std::fclose(file_) != 0) throw IoError("snapshot writer: close failed");
  file_ = nullptr;
  finished_ = true;
}

SnapshotReader::SnapshotReader(const std::string& path) : path_(path) {
  file_ = std::fopen(path.c_str(), "rb");
  if (!file_) throw IoError("snapshot reader: cannot open " + path);
  char magic[4];
  if (std::fread(magic, 1, 4, file_) != 4 || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("snapshot reader: bad magic in " + path);
  const std::uint32_t version = read_u32(file_);
  if (version != kVersion) throw IoError("snapshot reader: unsupported version");
  rows_ = static_cast<Index>(read_u64(file_));
  cols_ = static_cast<Index>(read_u64(file_));
  if (read_u32(file_) != kDtypeF64) throw IoError("snapshot reader: unsupported dtype");
}

SnapshotReader::~SnapshotReader() {
  if (file_) std::fclose(file_);
}

bool SnapshotReader::next(Vector& out) {
  if (cursor_ >= cols_) return false;
  out.resize(rows_);
  const std::size_t n = static_cast<std::size_t>(rows_);
  if (std::fread(out.data(), sizeof(double), n, file_) != n)
    throw IoError("snapshot reader: truncated file " + path_);
  ++cursor_;
  return true;
}

void SnapshotReader::reset() {
  if (std::fseek(file_, static_cast<long>(kHeaderBytes), SEEK_SET) != 0)
    throw IoError("snapshot reader: seek failed");
  cursor_ = 0;
}

Matrix SnapshotReader::read_all() {
  reset();
  Matrix m(rows_, cols_);
  Vector col;
  for (Index j = 0; j < cols_; ++j) {
    if (!next(col)) throw IoError("snapshot reader: truncated file " + path_);
    m.col(j) = col;
  }
  return m;
}

void write_matrix(const std::string& path, const Matrix& m) {
  SnapshotWriter w(path, m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) w.append(m.col(j));
  w.finish();
}

Matrix read_matrix(const std::string& path) {
  SnapshotReader r(path);
  return r.read_all();
}

void write_metadata(const std::string& path, const std::map<std::string, std::string>& meta) {
  std::ofstream out(path);
  if (!out) throw IoError("metadata: cannot open " + path);
  for (const auto& [key, value] : meta) out << key << "=" << value << "\n";
}

std::map<std::string, std::string> read_metadata(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("metadata: cannot open " + path);
  std::map<std::string, std::string> meta;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError("metadata: malformed line in " + path);
    meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return meta;
}

}  // namespace srom
