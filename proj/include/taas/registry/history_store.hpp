#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "taas/core_types.hpp"
#include "taas/registry/registry.hpp"

namespace taas::registry {

enum class Outcome { Completed, Terminated, Failed };

const char* to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

/// One observation of a device executing a task of a given type.
/// Records are append-only and never mutated.
struct PerformanceRecord {
    double timestamp_s = 0;
    std::string task_type;
    std::string device_id;
    double processing_speed_mbps = 0;
    double completion_accuracy = 0;
    Outcome outcome = Outcome::Completed;

    /// Throws ConfigError when a field is out of range.
    void validate() const;

    /// Tab-separated line form; see docs/file-formats.md.
    std::string to_line() const;
    static PerformanceRecord from_line(const std::string& line);

    bool operator==(const PerformanceRecord&) const = default;
};

struct HistoryQuery {
    std::string task_type;
    double window_s = 7 * 24 * 3600;
    HistoryDimensions dimensions;

    void validate() const;
};

/// Hierarchical performance database: task type -> device -> time-ordered
/// records, with an optional append-only log file behind it.
class HistoryStore {
public:
    HistoryStore() = default;

    /// Opens (creating if needed) a log file and replays its records.
    explicit HistoryStore(const std::filesystem::path& log_path);

    /// Binds a registry so appends can enforce device existence.
    void attach_registry(const Registry* registry) { registry_ = registry; }

    /// Throws ConfigError for an unknown device (when a registry is
    /// attached) or an invalid record.
    void append(const PerformanceRecord& rec);

    /// Records matching the query's task type and device, with
    /// timestamp in [now - window, now].
    std::vector<PerformanceRecord> query(const HistoryQuery& q,
                                         const std::string& device_id,
                                         double now_s) const;

    /// Flat copy of the whole log, in append order.
    std::vector<PerformanceRecord> all_records() const;

    std::size_t size() const;

    /// Mean completion accuracy over every record of a device, across all
    /// task types and all time. nullopt when the device has no records.
    std::optional<double> global_mean_accuracy(const std::string& device_id) const;

private:
    void index_record(const PerformanceRecord& rec);

    const Registry* registry_ = nullptr;
    mutable std::mutex m_;
    std::vector<PerformanceRecord> log_;
    std::map<std::string, std::map<std::string, std::vector<PerformanceRecord>>> index_;
    std::optional<std::ofstream> sink_;
};

} // namespace taas::registry
