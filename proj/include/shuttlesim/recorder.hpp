#ifndef SHUTTLESIM_RECORDER_HPP
#define SHUTTLESIM_RECORDER_HPP

// Match recording in the dataset CSV layout plus hit_z and reason columns,
// byte-stable serialization, and replay verification of recorded strokes.

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "shuttlesim/calibration.hpp"
#include "shuttlesim/rally.hpp"

namespace shuttlesim {

/// A dataset row plus the simulated hit height. `reason` is set on the last
/// stroke of each rally only. `row.landing` is the stroke's effective aim.
struct StrokeRecord {
  BlsrRow row;
  double hit_z = 0.0;
  std::optional<OutcomeReason> reason;

  friend bool operator==(const StrokeRecord&, const StrokeRecord&) = default;
};

inline constexpr std::string_view kRecordExtraColumns = ",hit_z,reason";

class RecordSink {
 public:
  virtual ~RecordSink() = default;
  virtual void write(const StrokeRecord& record) = 0;
};

class VectorSink final : public RecordSink {
 public:
  void write(const StrokeRecord& record) override { records.push_back(record); }
  std::vector<StrokeRecord> records;
};

/// Streams CSV. The hash comment and header are written on construction;
/// a failed write raises IoError naming the 0-based stroke index.
class CsvSink final : public RecordSink {
 public:
  CsvSink(std::ostream& out, const std::string& params_hash);
  void write(const StrokeRecord& record) override;

 private:
  std::ostream& out_;
  std::size_t written_ = 0;
};

/// Turns engine events into records. A stroke is held back until the next
/// stroke or the rally's end so the terminal reason can be attached.
class MatchRecorder {
 public:
  MatchRecorder(RecordSink& sink, const MetaParams& params);

  /// Start a rally; scores on its rows are taken from `state`.
  void begin_rally(std::string rally_id, const RallyState& state);
  void observe(const StepResult& step);

  std::size_t strokes() const { return strokes_; }

 private:
  void emit();

  RecordSink& sink_;
  const MetaParams& params_;
  CourtSpec court_;
  std::string rally_;
  Score score_;
  std::optional<StrokeRecord> pending_;
  std::size_t strokes_ = 0;
};

/// "1.500000": fixed six decimals, never an exponent.
std::string format_fixed(double v);

std::string record_header();
std::string format_record(const StrokeRecord& record);

struct RecordFile {
  std::string params_hash;  ///< empty when the file has no hash line
  std::vector<StrokeRecord> records;
};

std::string serialize(const RecordFile& file);
/// Throws ParseError (with line number) on header, arity or number errors.
RecordFile deserialize(std::istream& in);

struct ReplayReport {
  bool exact = true;  ///< params hash matched the file's
  std::size_t strokes = 0;
  std::size_t rallies = 0;
  /// Largest |replayed landing - recorded landing| over launched strokes.
  double max_landing_deviation = 0.0;
  /// Largest |replayed position - next recorded hit| at recorded intercepts.
  double max_path_deviation = 0.0;
  std::size_t worst_stroke = 0;
  /// Strokes whose feasibility or recorded outcome the replay contradicts.
  std::size_t mismatches = 0;
  double tolerance = 0.0;
  bool pass = true;
};

inline constexpr double kReplayExactTolerance = 1e-6;

/// Re-solve and re-fly every recorded stroke. Landings, intercept positions
/// and outcomes are always measured. Exact mode (matching params hash) passes
/// only if all of them agree at 1e-6 m; otherwise pass/fail looks at landings
/// alone, against the solver tolerance.
ReplayReport replay(const RecordFile& file, const MetaParams& params, const CourtSpec& court = {});

}  // namespace shuttlesim

#endif  // SHUTTLESIM_RECORDER_HPP
