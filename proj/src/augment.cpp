#include "affvqa/augment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>

namespace affvqa::augment {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> whitespace_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

// Lowercased tokens with leading/trailing punctuation stripped.
std::set<std::string> token_set(const std::string& text) {
    std::set<std::string> out;
    for (std::string tok : whitespace_tokens(lower(text))) {
        std::size_t b = 0, e = tok.size();
        while (b < e && !std::isalnum(static_cast<unsigned char>(tok[b]))) ++b;
        while (e > b && !std::isalnum(static_cast<unsigned char>(tok[e - 1]))) --e;
        if (e > b) out.insert(tok.substr(b, e - b));
    }
    return out;
}

} // namespace

std::string build_grounding_prompt(const std::string& object,
                                   const std::vector<std::string>& history) {
    if (object.empty())
        throw std::invalid_argument("build_grounding_prompt: empty object name");
    std::ostringstream out;
    out << "Role:\n"
        << "You are an analytical assistant specializing in robotic affordance "
           "grounding. Your expertise is in creating tasks that facilitate the "
           "training of robotic policies, enabling robots to reason about task "
           "execution, such as determining the appropriate part of an object to "
           "grasp.\n\n";
    out << "Task Description:\n"
        << "You will be provided with the name of a tool that can be attached to "
           "a robotic arm. The robot is expected to use this tool to perform a "
           "variety of everyday tasks. Along with the tool name, you will receive "
           "a list of tasks that have already been generated for this tool.\n\n";
    out << "Guidelines:\n"
        << "Diversity: Aim for a wide range of tasks, ensuring that there is no "
           "overlap with previous ones.\n"
        << "Daily Tasks: Tasks should be common and representative of the ones "
           "encountered in daily life.\n"
        << "Leakage Avoidance: Ensure that the generated tasks do not explicitly "
           "mention the name of the tool object.\n\n";
    out << "Examples:\n"
        << "{\"example_tool\": [\"scoop flour out of an open bag\", "
           "\"stir a pot of soup while it simmers\"]}\n\n";
    out << "Instruction:\n"
        << "With the provided OBJECT_NAME: \"" << object
        << "\", generate five new affordance grounding tasks. Use the HISTORY of "
           "generated tasks as a reference to ensure compliance with the "
           "diversity guideline. Output should be in the JSON format with the "
           "object name as the key.\n\n";
    out << "HISTORY:\n";
    for (const auto& prior : history) out << "- " << prior << "\n";
    return out.str();
}

double token_set_jaccard(const std::string& a, const std::string& b) {
    auto sa = token_set(a);
    auto sb = token_set(b);
    if (sa.empty() && sb.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& t : sa) inter += sb.count(t);
    std::size_t uni = sa.size() + sb.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Validation validate_grounding_task(const std::string& candidate,
                                   const std::string& object,
                                   const std::vector<std::string>& history,
                                   double jaccard_threshold) {
    if (candidate.empty()) return Validation::reject("empty");
    const std::string text = lower(candidate);
    // The full name and every word of a multiword name reveal the tool, even
    // inside longer words.
    std::vector<std::string> blocked = whitespace_tokens(lower(object));
    blocked.push_back(lower(object));
    for (const auto& word : blocked)
        if (!word.empty() && text.find(word) != std::string::npos)
            return Validation::reject("leakage");
    for (const auto& prior : history)
        if (token_set_jaccard(candidate, prior) >= jaccard_threshold)
            return Validation::reject("duplicate");
    return Validation::accept();
}

int backoff_delay_ms(const LlmEndpointConfig& cfg, int attempt) {
    long delay = cfg.initial_backoff_ms;
    for (int i = 0; i < attempt; ++i) delay = std::min(delay * 2, 60'000L);
    return static_cast<int>(delay);
}

namespace {

// category -> generic task phrasings; every entry passes
// validate_grounding_task against its category and the earlier entries.
const std::map<std::string, std::vector<std::string>>& fallback_table() {
    static const std::map<std::string, std::vector<std::string>> table = {
        {"hammer", {"drive a nail into a wooden plank",
                    "tap a dowel into its slot",
                    "break apart an old crate"}},
        {"wrench", {"tighten a hex nut on a bolt",
                    "loosen a stubborn pipe fitting",
                    "adjust the tension of a bicycle axle"}},
        {"screwdriver", {"fasten a loose hinge plate",
                         "pry open a tin of paint",
                         "tighten the terminals inside a wall socket"}},
        {"ratchet", {"drive a socket onto a stubborn bolt",
                     "fasten wheel nuts in a tight engine bay",
                     "loosen a rusted fastener quickly"}},
        {"pliers", {"grip a wire while twisting it",
                    "pull a bent nail from a board",
                    "hold a small part steady for filing"}},
        {"mug", {"hold freshly brewed coffee",
                 "carry hot tea to the desk",
                 "store pens upright on a shelf"}},
        {"bowl", {"mix pancake batter for breakfast",
                  "hold a serving of tossed salad",
                  "collect vegetable peelings while cooking"}},
        {"knife", {"slice a loaf of fresh bread",
                   "chop vegetables for a stew",
                   "open a sealed cardboard parcel"}},
        {"spatula", {"flip pancakes on a hot griddle",
                     "scrape batter from the sides of a container",
                     "lift a fried egg without breaking it"}},
        {"pan", {"sear a steak over high heat",
                 "simmer a tomato sauce slowly",
                 "toast sesame seeds until golden"}},
        {"whisk", {"beat eggs until fluffy",
                   "blend dry ingredients evenly",
                   "whip cream for a dessert"}},
        {"strainer", {"drain cooked noodles over the sink",
                      "rinse berries under running water",
                      "sift lumps out of a sauce"}},
        {"ladle", {"serve soup into bowls",
                   "portion stew at the table",
                   "transfer broth between pots"}},
        {"scissors", {"cut wrapping paper to size",
                      "trim loose threads from a shirt",
                      "open a plastic snack pouch"}},
        {"spoon", {"stir sugar into coffee",
                   "scoop yogurt from a tub",
                   "taste a simmering sauce"}},
        {"cup", {"hold a shot of espresso",
                 "rinse a toothbrush at the sink",
                 "water a small potted plant"}},
        {"bottle", {"carry water on a hike",
                    "store juice in the fridge",
                    "squeeze oil over a salad"}},
        {"kettle", {"boil water for morning tea",
                    "fill a thermos before a trip",
                    "steep herbs in hot water"}},
        {"drill", {"bore pilot holes in a plank",
                   "mix paint with a stirring attachment",
                   "sink anchors into a brick wall"}},
        {"utensil", {"serve rice from the cooker",
                     "plate noodles for dinner",
                     "toss a stir fry in the wok"}},
    };
    return table;
}

} // namespace

std::vector<GroundingTask> fallback_generate(const std::string& object, std::size_t n,
                                             std::string* warning) {
    std::vector<GroundingTask> out;
    auto it = fallback_table().find(lower(object));
    if (it == fallback_table().end()) {
        if (warning) *warning = "no fallback templates for category '" + object + "'";
        return out;
    }
    for (const auto& description : it->second) {
        if (out.size() >= n) break;
        out.push_back(GroundingTask{object, description, GroundingTask::Origin::fallback});
    }
    return out;
}

namespace {

struct ReplyParse {
    bool ok = false;
    std::string error;
    std::vector<std::string> candidates;
};

// Extracts the candidate list for `object` from a chat-completion response
// body. The assistant content may wrap the JSON in prose or code fences.
ReplyParse parse_reply(const std::string& body, const std::string& object) {
    ReplyParse out;
    nlohmann::json reply = nlohmann::json::parse(body, nullptr, false);
    if (reply.is_discarded()) {
        out.error = "response body is not JSON";
        return out;
    }
    std::string content;
    try {
        content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        out.error = "response lacks choices[0].message.content";
        return out;
    }
    std::size_t open = content.find('{');
    std::size_t close = content.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        out.error = "assistant content contains no JSON object";
        return out;
    }
    nlohmann::json payload =
        nlohmann::json::parse(content.substr(open, close - open + 1), nullptr, false);
    if (payload.is_discarded() || !payload.is_object()) {
        out.error = "assistant content is not a JSON object";
        return out;
    }
    if (!payload.contains(object) || !payload.at(object).is_array()) {
        out.error = "reply JSON lacks an array keyed by the object name";
        return out;
    }
    for (const auto& item : payload.at(object)) {
        if (!item.is_string()) {
            out.error = "candidate list contains a non-string";
            return out;
        }
        out.candidates.push_back(item.get<std::string>());
    }
    out.ok = true;
    return out;
}

} // namespace

std::vector<GroundingTask> request_grounding_tasks(const std::string& object,
                                                   const std::vector<std::string>& history,
                                                   const LlmEndpointConfig& cfg,
                                                   std::size_t n) {
    if (!cfg.valid()) throw std::invalid_argument("request_grounding_tasks: bad config");
    if (cfg.offline) return fallback_generate(object, n);

    const std::string prompt = build_grounding_prompt(object, history);
    nlohmann::json request{{"model", cfg.model},
                           {"messages", {{{"role", "user"}, {"content", prompt}}}}};

    httplib::Client client(cfg.base_url);
    client.set_connection_timeout(cfg.timeout_seconds, 0);
    client.set_read_timeout(cfg.timeout_seconds, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv(cfg.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string last_failure = "no attempt made";
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(
                std::chrono::milliseconds(backoff_delay_ms(cfg, attempt - 1)));
        auto res = client.Post(cfg.path, headers, request.dump(), "application/json");
        if (!res) {
            last_failure = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_failure = "HTTP status " + std::to_string(res->status);
            continue;
        }
        ReplyParse parsed = parse_reply(res->body, object);
        if (!parsed.ok) {
            last_failure = parsed.error;
            continue;
        }
        // A parseable reply ends the retry loop even if every candidate is
        // rejected; only transport/parse failures are retried.
        std::vector<GroundingTask> accepted;
        std::vector<std::string> seen = history;
        for (const auto& candidate : parsed.candidates) {
            if (accepted.size() >= n) break;
            if (validate_grounding_task(candidate, object, seen).accepted) {
                accepted.push_back(GroundingTask{object, candidate, GroundingTask::Origin::llm});
                seen.push_back(candidate);
            }
        }
        return accepted;
    }
    throw EndpointError("grounding request for '" + object + "' failed after " +
                        std::to_string(cfg.max_retries + 1) + " attempts: " + last_failure);
}

nlohmann::json tasks_to_json(const std::map<std::string, std::vector<GroundingTask>>& by_object) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [object, tasks] : by_object) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& task : tasks)
            arr.push_back({{"description", task.description},
                           {"origin", task.origin == GroundingTask::Origin::llm ? "llm"
                                                                                : "fallback"}});
        out[object] = std::move(arr);
    }
    return out;
}

std::map<std::string, std::vector<GroundingTask>> tasks_from_json(const nlohmann::json& j) {
    std::map<std::string, std::vector<GroundingTask>> out;
    for (const auto& [object, arr] : j.items()) {
        std::vector<GroundingTask> tasks;
        for (const auto& item : arr) {
            GroundingTask task;
            task.object = object;
            task.description = item.at("description").get<std::string>();
            task.origin = item.value("origin", "fallback") == "llm"
                              ? GroundingTask::Origin::llm
                              : GroundingTask::Origin::fallback;
            tasks.push_back(std::move(task));
        }
        out[object] = std::move(tasks);
    }
    return out;
}

} // namespace affvqa::augment
