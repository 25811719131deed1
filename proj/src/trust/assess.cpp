#include "taas/trust/assess.hpp"

#include "taas/util/format.hpp"

namespace taas::trust {

Json HistoricalAssessment::to_json() const {
    Json j{{"device_id", device_id},
           {"task_type", task_type},
           {"trustworthy", trustworthy},
           {"sample_count", sample_count}};
    if (mean_speed_mbps) j["mean_processing_speed_mbps"] = *mean_speed_mbps;
    if (mean_accuracy) j["mean_completion_accuracy"] = *mean_accuracy;
    return j;
}

HistoricalAssessment HistoricalAssessment::from_json(const Json& j) {
    HistoricalAssessment a;
    a.device_id = j.at("device_id").get<std::string>();
    a.task_type = j.at("task_type").get<std::string>();
    a.trustworthy = j.at("trustworthy").get<bool>();
    a.sample_count = j.at("sample_count").get<int>();
    if (j.contains("mean_processing_speed_mbps")) {
        a.mean_speed_mbps = j.at("mean_processing_speed_mbps").get<double>();
    }
    if (j.contains("mean_completion_accuracy")) {
        a.mean_accuracy = j.at("mean_completion_accuracy").get<double>();
    }
    return a;
}

Json ResourceAssessment::to_json() const {
    Json j{{"device_id", device_id}, {"trustworthy", trustworthy}};
    if (cpu_class) j["cpu_class"] = to_string(*cpu_class);
    if (cpu_ghz) j["cpu_ghz"] = *cpu_ghz;
    if (storage_sufficient) j["storage_sufficient"] = *storage_sufficient;
    if (available_storage_gb) j["available_storage_gb"] = *available_storage_gb;
    if (required_storage_gb) j["required_storage_gb"] = *required_storage_gb;
    return j;
}

ResourceAssessment ResourceAssessment::from_json(const Json& j) {
    ResourceAssessment a;
    a.device_id = j.at("device_id").get<std::string>();
    a.trustworthy = j.at("trustworthy").get<bool>();
    if (j.contains("cpu_class")) {
        a.cpu_class = cpu_class_from_string(j.at("cpu_class").get<std::string>());
    }
    if (j.contains("cpu_ghz")) a.cpu_ghz = j.at("cpu_ghz").get<double>();
    if (j.contains("storage_sufficient")) {
        a.storage_sufficient = j.at("storage_sufficient").get<bool>();
    }
    if (j.contains("available_storage_gb")) {
        a.available_storage_gb = j.at("available_storage_gb").get<double>();
    }
    if (j.contains("required_storage_gb")) {
        a.required_storage_gb = j.at("required_storage_gb").get<double>();
    }
    return a;
}

HistoricalAssessment assess_history(const std::string& device_id,
                                    std::span<const registry::PerformanceRecord> records,
                                    const nlu::TaskRequirements& req,
                                    const TrustGates& gates) {
    HistoricalAssessment a;
    a.device_id = device_id;
    a.task_type = req.task_type;
    a.sample_count = static_cast<int>(records.size());

    if (!records.empty()) {
        if (req.history_dims.processing_speed) {
            double sum = 0;
            for (const auto& r : records) sum += r.processing_speed_mbps;
            a.mean_speed_mbps = sum / static_cast<double>(records.size());
        }
        if (req.history_dims.completion_accuracy) {
            double sum = 0;
            for (const auto& r : records) sum += r.completion_accuracy;
            a.mean_accuracy = sum / static_cast<double>(records.size());
        }
    }

    a.trustworthy = a.sample_count >= gates.min_samples;
    if (req.history_dims.processing_speed) {
        a.trustworthy = a.trustworthy && a.mean_speed_mbps &&
                        *a.mean_speed_mbps >= gates.min_speed_mbps;
    }
    if (req.history_dims.completion_accuracy) {
        a.trustworthy = a.trustworthy && a.mean_accuracy &&
                        *a.mean_accuracy >= gates.min_accuracy;
    }
    return a;
}

ResourceAssessment assess_resources(const ResourceSnapshot& snapshot,
                                    const nlu::TaskRequirements& req,
                                    const TrustGates& gates) {
    ResourceAssessment a;
    a.device_id = snapshot.device_id;

    if (req.resources.min_cpu_class) {
        a.cpu_ghz = snapshot.cpu_ghz;
        if (snapshot.cpu_ghz) {
            a.cpu_class = classify_cpu(*snapshot.cpu_ghz, gates);
            a.trustworthy = a.trustworthy &&
                            static_cast<int>(*a.cpu_class) >=
                                static_cast<int>(*req.resources.min_cpu_class);
        } else {
            a.trustworthy = false;
        }
    }

    if (req.resources.min_storage_gb) {
        a.required_storage_gb = req.resources.min_storage_gb;
        a.available_storage_gb = snapshot.available_storage_gb;
        if (snapshot.available_storage_gb) {
            a.storage_sufficient =
                *snapshot.available_storage_gb >= *req.resources.min_storage_gb;
            a.trustworthy = a.trustworthy && *a.storage_sufficient;
        } else {
            a.trustworthy = false;
        }
    }
    return a;
}

std::pair<std::string, std::string> render_semantic(const HistoricalAssessment& his,
                                                    const ResourceAssessment& res,
                                                    const nlu::TaskRequirements& req) {
    std::string semantic_his;
    if (req.history_dims.processing_speed && his.mean_speed_mbps) {
        semantic_his += "task processing speed is " +
                        util::format_quantity(*his.mean_speed_mbps) + " MB/second";
    }
    if (req.history_dims.completion_accuracy && his.mean_accuracy) {
        if (!semantic_his.empty()) semantic_his += ", ";
        semantic_his += "task completion accuracy is " +
                        util::format_quantity(*his.mean_accuracy * 100.0) + "%";
    }

    std::string semantic_res;
    if (req.resources.min_cpu_class && res.cpu_ghz && res.cpu_class) {
        semantic_res += "CPU is " + util::format_quantity(*res.cpu_ghz) + " GHz (" +
                        to_string(*res.cpu_class) + " processing speed)";
    }
    if (req.resources.min_storage_gb && res.available_storage_gb &&
        res.storage_sufficient) {
        const std::string clause =
            "available storage is " + util::format_quantity(*res.available_storage_gb) +
            " GB (" + (*res.storage_sufficient ? ">" : "<") + " " +
            util::format_quantity(*res.required_storage_gb) + " GB required)";
        if (semantic_res.empty()) {
            semantic_res = "The " + clause;
        } else {
            semantic_res += ", and the " + clause;
        }
    }
    return {semantic_his, semantic_res};
}

} // namespace taas::trust
