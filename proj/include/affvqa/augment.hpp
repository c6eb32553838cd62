#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace affvqa::augment {

/// A task-specific affordance grounding description for one tool category.
struct GroundingTask {
    std::string object;
    std::string description;
    enum class Origin { llm, fallback } origin = Origin::fallback;
};

struct LlmEndpointConfig {
    std::string base_url = "http://localhost:8080";
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-4";
    std::string api_key_env = "LLM_API_KEY";
    int max_retries = 3;          // retries after the first attempt
    int timeout_seconds = 30;
    int max_concurrent = 1;
    int initial_backoff_ms = 250;
    bool offline = false;

    bool valid() const { return max_retries >= 0 && max_concurrent >= 1; }
};

struct EndpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Prompt with Role / Task Description / Guidelines / Examples / Instruction
/// blocks; the object name appears exactly once, in the Instruction slot,
/// and prior tasks are listed in the HISTORY block.
std::string build_grounding_prompt(const std::string& object,
                                   const std::vector<std::string>& history);

struct Validation {
    bool accepted = false;
    std::string reason; // "leakage" / "duplicate" when rejected

    static Validation accept() { return {true, ""}; }
    static Validation reject(std::string why) { return {false, std::move(why)}; }
};

/// Rejects "leakage" when the object name or any whitespace token of it
/// occurs case-insensitively in the candidate (including inside longer
/// words), and "duplicate" when the lowercase token-set Jaccard similarity
/// with any history entry reaches the threshold.
Validation validate_grounding_task(const std::string& candidate,
                                   const std::string& object,
                                   const std::vector<std::string>& history,
                                   double jaccard_threshold = 0.6);

double token_set_jaccard(const std::string& a, const std::string& b);

/// Backoff before retry `attempt` (0-based); doubles per attempt, so delays
/// are monotone non-decreasing.
int backoff_delay_ms(const LlmEndpointConfig& cfg, int attempt);

/// Deterministic offline generator backed by a built-in per-category table.
/// Returns at most n tasks; unknown categories yield an empty list plus a
/// warning in *warning (when non-null).
std::vector<GroundingTask> fallback_generate(const std::string& object, std::size_t n,
                                             std::string* warning = nullptr);

/// Sends the built prompt to the chat-completion endpoint, parses the JSON
/// reply, validates each candidate and returns the accepted ones. Transport
/// errors and unparseable replies are retried with exponential backoff; when
/// retries are exhausted an EndpointError carries the last failure. In
/// offline mode this delegates to fallback_generate.
std::vector<GroundingTask> request_grounding_tasks(const std::string& object,
                                                   const std::vector<std::string>& history,
                                                   const LlmEndpointConfig& cfg,
                                                   std::size_t n = 5);

/// Artifact schema: JSON map category -> [{"description", "origin"}, ...].
nlohmann::json tasks_to_json(const std::map<std::string, std::vector<GroundingTask>>& by_object);
std::map<std::string, std::vector<GroundingTask>> tasks_from_json(const nlohmann::json& j);

} // namespace affvqa::augment
