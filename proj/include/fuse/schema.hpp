#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace fuse {

enum class Source { Logs, Emotion, Gaze };

enum class Kind { Numeric, Categorical };

const char* source_name(Source s);
std::optional<Source> source_from_name(const std::string& name);

struct Attribute {
    std::string name;
    Source source = Source::Logs;
    Kind kind = Kind::Numeric;
    std::vector<std::string> categories; // non-empty iff categorical

    bool operator==(const Attribute&) const = default;
};

// Ordered attribute inventory plus the class label order. The label order is
// fixed and used for every tie-break in the project.
class Schema {
public:
    Schema() = default;
    Schema(std::vector<Attribute> attributes, std::vector<std::string> class_labels);

    const std::vector<Attribute>& attributes() const { return attributes_; }
    const Attribute& attribute(std::size_t i) const { return attributes_[i]; }
    std::size_t size() const { return attributes_.size(); }
    const std::vector<std::string>& class_labels() const { return class_labels_; }
    std::size_t n_classes() const { return class_labels_.size(); }

    std::optional<std::size_t> index_of(const std::string& name) const;
    std::optional<int> class_index(const std::string& label) const;
    std::vector<std::size_t> indices_for(Source s) const;

    // Category index lookup within attribute `attr`.
    std::optional<std::size_t> category_index(std::size_t attr, const std::string& value) const;

    bool operator==(const Schema&) const = default;

private:
    std::vector<Attribute> attributes_;
    std::vector<std::string> class_labels_;
};

// The fourteen attributes named by the source systems: three activity counts
// from the tutor logs, eight emotion confidences, three gaze fixation counts.
// Class labels default to {PASS, FAIL}.
Schema default_schema();

// Restriction of a schema to one source, preserving order.
Schema schema_for_source(const Schema& full, Source s);

} // namespace fuse
