#pragma once

#include <cstdio>
#include <map>
#include <memory>
#include <string>

#include "srom/types.hpp"

namespace srom {

/// Sequential source of state vectors. Multi-pass pipelines call reset().
class SnapshotSource {
 public:
  virtual ~SnapshotSource() = default;
  virtual Index dim() const = 0;
  virtual Index count() const = 0;
  virtual bool next(Vector& out) = 0;
  virtual void reset() = 0;
};

/// In-memory source over matrix columns.
class MatrixSource final : public SnapshotSource {
 public:
  explicit MatrixSource(Matrix data) : data_(std::move(data)) {}
  Index dim() const override { return data_.rows(); }
  Index count() const override { return data_.cols(); }
  bool next(Vector& out) override {
    if (cursor_ >= data_.cols()) return false;
    out = data_.col(cursor_++);
    return true;
  }
  void reset() override { cursor_ = 0; }

 private:
  Matrix data_;
  Index cursor_ = 0;
};

/// Binary container for column-major f64 matrices: magic "SROM", version u32,
/// rows u64, cols u64, dtype tag u32 (1 = little-endian f64), then cols
/// contiguous column records. Snapshots, inputs, and learned operators all
/// use this layout.
class SnapshotWriter {
 public:
  SnapshotWriter(const std::string& path, Index rows, Index cols);
  ~SnapshotWriter();
  SnapshotWriter(const SnapshotWriter&) = delete;
  SnapshotWriter& operator=(const SnapshotWriter&) = delete;

  void append(ConstVectorRef column);
  /// Flushes and verifies the declared column count was written.
  void finish();

 private:
  std::FILE* file_ = nullptr;
  std::string path_;
  Index rows_, cols_;
  Index written_ = 0;
  bool finished_ = false;
};

/// Streaming reader; never materializes the full matrix unless asked to.
class SnapshotReader final : public SnapshotSource {
 public:
  explicit SnapshotReader(const std::string& path);
  ~SnapshotReader();
  SnapshotReader(const SnapshotReader&) = delete;
  SnapshotReader& operator=(const SnapshotReader&) = delete;

  Index dim() const override { return rows_; }
  Index count() const override { return cols_; }
  bool next(Vector& out) override;
  void reset() override;

  Matrix read_all();

 private:
  std::FILE* file_ = nullptr;
  std::string path_;
  Index rows_ = 0, cols_ = 0;
  Index cursor_ = 0;
};

void write_matrix(const std::string& path, const Matrix& m);
Matrix read_matrix(const std::string& path);

/// Key=value sidecar records (time step, parameter value, seeds, ...).
void write_metadata(const std::string& path, const std::map<std::string, std::string>& meta);
std::map<std::string, std::string> read_metadata(const std::string& path);

}  // namespace srom
