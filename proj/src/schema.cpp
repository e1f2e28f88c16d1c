#include "fuse/schema.hpp"

#include <unordered_set>

#include "fuse/error.hpp"

namespace fuse {

const char* source_name(Source s) {
    switch (s) {
        case Source::Logs: return "logs";
        case Source::Emotion: return "emotion";
        case Source::Gaze: return "gaze";
    }
    return "?";
}

std::optional<Source> source_from_name(const std::string& name) {
    if (name == "logs") return Source::Logs;
    if (name == "emotion") return Source::Emotion;
    if (name == "gaze") return Source::Gaze;
    return std::nullopt;
}

namespace {

// Rule text and CSV both embed these names, so keep them free of the
// delimiters those formats rely on.
void check_name(const std::string& name, const char* what) {
    if (name.empty()) throw DataError(std::string(what) + " name must be non-empty");
    if (name.find(',') != std::string::npos)
        throw DataError(std::string(what) + " name '" + name + "' must not contain a comma");
    if (name.find(" AND ") != std::string::npos || name.find(" Then ") != std::string::npos)
        throw DataError(std::string(what) + " name '" + name + "' contains a reserved token");
    if (name.front() == ' ' || name.back() == ' ')
        throw DataError(std::string(what) + " name '" + name + "' has leading/trailing spaces");
}

} // namespace

Schema::Schema(std::vector<Attribute> attributes, std::vector<std::string> class_labels)
    : attributes_(std::move(attributes)), class_labels_(std::move(class_labels)) {
    std::unordered_set<std::string> seen;
    for (const auto& a : attributes_) {
        check_name(a.name, "attribute");
        if (!seen.insert(a.name).second)
            throw DataError("duplicate attribute name '" + a.name + "'");
        if (a.kind == Kind::Categorical) {
            if (a.categories.empty())
                throw DataError("categorical attribute '" + a.name + "' has no categories");
            std::unordered_set<std::string> cats;
            for (const auto& c : a.categories) {
                check_name(c, "category");
                if (!cats.insert(c).second)
                    throw DataError("duplicate category '" + c + "' in attribute '" + a.name + "'");
            }
        } else if (!a.categories.empty()) {
            throw DataError("numeric attribute '" + a.name + "' must not declare categories");
        }
    }
    if (class_labels_.size() < 2) throw DataError("schema needs at least two class labels");
    std::unordered_set<std::string> labels;
    for (const auto& l : class_labels_) {
        check_name(l, "class label");
        if (!labels.insert(l).second) throw DataError("duplicate class label '" + l + "'");
    }
}

std::optional<std::size_t> Schema::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i)
        if (attributes_[i].name == name) return i;
    return std::nullopt;
}

std::optional<int> Schema::class_index(const std::string& label) const {
    for (std::size_t i = 0; i < class_labels_.size(); ++i)
        if (class_labels_[i] == label) return static_cast<int>(i);
    return std::nullopt;
}

std::vector<std::size_t> Schema::indices_for(Source s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < attributes_.size(); ++i)
        if (attributes_[i].source == s) out.push_back(i);
    return out;
}

std::optional<std::size_t> Schema::category_index(std::size_t attr, const std::string& value) const {
    const auto& cats = attributes_[attr].categories;
    for (std::size_t i = 0; i < cats.size(); ++i)
        if (cats[i] == value) return i;
    return std::nullopt;
}

Schema default_schema() {
    std::vector<Attribute> attrs;
    auto add = [&](const char* name, Source src) {
        attrs.push_back(Attribute{name, src, Kind::Numeric, {}});
    };
    add("SummAll", Source::Logs);
    add("COIStotalFreq", Source::Logs);
    add("PKAtotalFreq", Source::Logs);
    add("anger", Source::Emotion);
    add("contempt", Source::Emotion);
    add("disgust", Source::Emotion);
    add("fear", Source::Emotion);
    add("happiness", Source::Emotion);
    add("neutral", Source::Emotion);
    add("sadness", Source::Emotion);
    add("surprise", Source::Emotion);
    add("AOI1FixCount", Source::Gaze);
    add("AOI2FixCount", Source::Gaze);
    add("AOI3FixCount", Source::Gaze);
    return Schema(std::move(attrs), {"PASS", "FAIL"});
}

Schema schema_for_source(const Schema& full, Source s) {
    std::vector<Attribute> attrs;
    for (const auto& a : full.attributes())
        if (a.source == s) attrs.push_back(a);
    return Schema(std::move(attrs), full.class_labels());
}

} // namespace fuse
