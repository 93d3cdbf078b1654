#pragma once

#include "duet/gateway.hpp"
#include "duet/profile.hpp"
#include "duet/questions.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace duet::analytics {

const std::vector<std::string>& default_fillers();

/// word_tokens minus fillers (matched case-insensitively).
std::vector<std::string> tokenize_response(const std::string& transcript,
                                           const std::vector<std::string>& fillers = default_fillers());

enum class CodeDimension { topical_relevance, intelligibility, accuracy };
std::string_view to_string(CodeDimension d);
CodeDimension code_dimension_from_string(std::string_view name);
/// Inclusive upper bound: 2, 2 and 1 respectively.
int max_code(CodeDimension d);

enum class CodeSource { coordinator, gateway_suggestion };

struct Codes {
    std::optional<int> topical_relevance;
    std::optional<int> intelligibility;
    std::optional<int> accuracy;

    bool operator==(const Codes&) const = default;

    std::optional<int> get(CodeDimension d) const;
    void set(CodeDimension d, int value);
    bool any() const { return topical_relevance || intelligibility || accuracy; }
};

struct ResponseRecord {
    std::string record_id;
    std::string question_id;
    std::string child_id;
    questions::Attribute attribute = questions::Attribute::character;
    std::string question_text;
    std::string transcript;
    std::vector<std::string> tokens;
    Codes manual_codes;
    /// Gateway suggestions; always reported as suggested.
    Codes auto_codes;

    bool operator==(const ResponseRecord&) const = default;

    /// Coordinator code when present, otherwise the suggestion.
    std::optional<int> effective(CodeDimension d) const;
};

/// Builds a record; tokens are computed here.
ResponseRecord make_record(std::string record_id, const questions::GeneratedQuestion& question,
                           const std::string& transcript, const Codes& manual = {});

/// OutOfRange outside the dimension's scale; GatewayCannotCode when a gateway
/// suggestion targets intelligibility. Suggestions only touch auto_codes, so
/// coordinator codes are never overwritten.
ResponseRecord code_response(ResponseRecord record, CodeDimension dimension, int value, CodeSource by);

/// Gateway-suggested relevance and accuracy for one record.
Codes suggest_codes(const ResponseRecord& record, const std::string& expected_answer, gateway::Gateway& gw,
                    const gateway::TemplateLibrary& templates);

/// Exact mean as a sum over a count.
struct Ratio {
    long long sum = 0;
    long long count = 0;

    bool operator==(const Ratio&) const = default;

    bool defined() const { return count > 0; }
    double value() const { return count ? static_cast<double>(sum) / static_cast<double>(count) : 0.0; }
    /// Reduced fraction such as "5/3", or "n/a" when undefined.
    std::string fraction() const;
};

struct EngagementMetrics {
    std::string child_id;
    int questions_answered = 0;
    int productivity = 0;
    int lexical_diversity = 0;
    Ratio topical_relevance_mean;
    Ratio intelligibility_mean;
    Ratio accuracy_mean;
    std::map<questions::Attribute, int> per_attribute_counts;
    /// How many of the coded values per dimension came from suggestions.
    std::map<std::string, int> suggested_counts;

    bool operator==(const EngagementMetrics&) const = default;
};

/// Pure and order-independent over the record multiset.
EngagementMetrics compute_engagement(const std::vector<ResponseRecord>& records, const std::string& child_id);

inline constexpr int kRepetitionThreshold = 3;

struct FeatureFeedback {
    std::string child_id;
    std::string entity;
    int occurrences = 0;
    profile::Tag proposal;
    std::vector<std::string> evidence;

    bool operator==(const FeatureFeedback&) const = default;
};

/// Capitalized English names (single words or runs such as "Disney Princess")
/// mentioned at least `threshold` times across one child's transcripts, minus
/// those the profile already likes.
std::vector<FeatureFeedback> derive_feature_feedback(const std::vector<ResponseRecord>& records,
                                                     const profile::ChildProfile& child,
                                                     int threshold = kRepetitionThreshold);

/// Tags the coordinator may approve into the profile.
std::vector<profile::Tag> propose_profile_updates(const std::vector<FeatureFeedback>& feedback);

struct EngagementReport {
    std::vector<EngagementMetrics> metrics;
    std::vector<ResponseRecord> answered;
    std::vector<FeatureFeedback> feedback;
    std::map<std::string, std::string> display_names;
    bool read_only = true;

    bool operator==(const EngagementReport&) const = default;
};

EngagementReport build_report(const std::vector<ResponseRecord>& records, const profile::SessionConfig& config);

/// Plain-text table: metrics, per-attribute counts, answered questions,
/// feedback proposals.
std::string report_text(const EngagementReport& report);

void to_json(Json& j, const Codes& c);
void from_json(const Json& j, Codes& c);
void to_json(Json& j, const ResponseRecord& r);
void from_json(const Json& j, ResponseRecord& r);
void to_json(Json& j, const Ratio& r);
void from_json(const Json& j, Ratio& r);
void to_json(Json& j, const EngagementMetrics& m);
void from_json(const Json& j, EngagementMetrics& m);
void to_json(Json& j, const FeatureFeedback& f);
void from_json(const Json& j, FeatureFeedback& f);
void to_json(Json& j, const EngagementReport& r);
void from_json(const Json& j, EngagementReport& r);

}  // namespace duet::analytics
