#include "taas/registry/history_store.hpp"

#include <sstream>

#include "taas/util/errors.hpp"
#include "taas/util/format.hpp"

namespace taas::registry {

const char* to_string(Outcome o) {
    switch (o) {
    case Outcome::Completed: return "completed";
    case Outcome::Terminated: return "terminated";
    case Outcome::Failed: return "failed";
    }
    return "failed";
}

Outcome outcome_from_string(const std::string& s) {
    if (s == "completed") return Outcome::Completed;
    if (s == "terminated") return Outcome::Terminated;
    if (s == "failed") return Outcome::Failed;
    throw ConfigError("unknown outcome: " + s);
}

void PerformanceRecord::validate() const {
    if (task_type.empty() || device_id.empty()) {
        throw ConfigError("performance record needs task_type and device_id");
    }
    if (processing_speed_mbps < 0) {
        throw ConfigError("processing_speed must be >= 0");
    }
    if (completion_accuracy < 0 || completion_accuracy > 1) {
        throw ConfigError("completion_accuracy must be within [0, 1]");
    }
}

std::string PerformanceRecord::to_line() const {
    std::string line;
    line += util::format_exact(timestamp_s);
    line += '\t';
    line += task_type;
    line += '\t';
    line += device_id;
    line += '\t';
    line += util::format_exact(processing_speed_mbps);
    line += '\t';
    line += util::format_exact(completion_accuracy);
    line += '\t';
    line += to_string(outcome);
    return line;
}

PerformanceRecord PerformanceRecord::from_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    if (fields.size() != 6) {
        throw ConfigError("bad history log line: " + line);
    }
    PerformanceRecord rec;
    rec.timestamp_s = util::parse_double(fields[0]);
    rec.task_type = fields[1];
    rec.device_id = fields[2];
    rec.processing_speed_mbps = util::parse_double(fields[3]);
    rec.completion_accuracy = util::parse_double(fields[4]);
    rec.outcome = outcome_from_string(fields[5]);
    rec.validate();
    return rec;
}

void HistoryQuery::validate() const {
    if (window_s <= 0) throw ConfigError("history window must be > 0");
    if (!dimensions.any()) throw ConfigError("history query needs a dimension");
}

HistoryStore::HistoryStore(const std::filesystem::path& log_path) {
    if (std::filesystem::exists(log_path)) {
        std::ifstream in(log_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const PerformanceRecord rec = PerformanceRecord::from_line(line);
            log_.push_back(rec);
            index_record(rec);
        }
    }
    sink_.emplace(log_path, std::ios::app);
    if (!sink_->is_open()) {
        throw ConfigError("cannot open history log: " + log_path.string());
    }
}

void HistoryStore::append(const PerformanceRecord& rec) {
    rec.validate();
    if (registry_ && !registry_->contains(rec.device_id)) {
        throw ConfigError("unknown device: " + rec.device_id);
    }
    std::lock_guard lk(m_);
    log_.push_back(rec);
    index_record(rec);
    if (sink_) {
        *sink_ << rec.to_line() << '\n';
        sink_->flush();
    }
}

std::vector<PerformanceRecord> HistoryStore::query(const HistoryQuery& q,
                                                   const std::string& device_id,
                                                   double now_s) const {
    q.validate();
    if (registry_ && !registry_->contains(device_id)) {
        throw ConfigError("unknown device: " + device_id);
    }
    std::lock_guard lk(m_);
    std::vector<PerformanceRecord> out;
    auto type_it = index_.find(q.task_type);
    if (type_it == index_.end()) return out;
    auto dev_it = type_it->second.find(device_id);
    if (dev_it == type_it->second.end()) return out;
    const double lo = now_s - q.window_s;
    for (const auto& rec : dev_it->second) {
        if (rec.timestamp_s >= lo && rec.timestamp_s <= now_s) {
            out.push_back(rec);
        }
    }
    return out;
}

std::vector<PerformanceRecord> HistoryStore::all_records() const {
    std::lock_guard lk(m_);
    return log_;
}

std::size_t HistoryStore::size() const {
    std::lock_guard lk(m_);
    return log_.size();
}

std::optional<double> HistoryStore::global_mean_accuracy(
    const std::string& device_id) const {
    std::lock_guard lk(m_);
    double sum = 0;
    std::size_t n = 0;
    for (const auto& rec : log_) {
        if (rec.device_id == device_id) {
            sum += rec.completion_accuracy;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

void HistoryStore::index_record(const PerformanceRecord& rec) {
    auto& bucket = index_[rec.task_type][rec.device_id];
    // keep the per-device bucket time-ordered
    auto it = bucket.end();
    while (it != bucket.begin() && std::prev(it)->timestamp_s > rec.timestamp_s) {
        --it;
    }
    bucket.insert(it, rec);
}

} // namespace taas::registry
