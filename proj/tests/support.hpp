#pragma once

#include "mmwoz/dataset.hpp"
#include "mmwoz/errors.hpp"
#include "mmwoz/gui.hpp"
#include "mmwoz/kb.hpp"
#include "mmwoz/layout.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

namespace mmwoz::testing {

inline std::filesystem::path source_dir() { return MMWOZ_SOURCE_DIR; }

inline kb::DatabasePtr full_db() {
    static const kb::DatabasePtr db = kb::load_database(source_dir() / "data/db");
    return db;
}

inline kb::DatabasePtr sample_db() {
    static const kb::DatabasePtr db = kb::load_database(source_dir() / "data/sample_db");
    return db;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("mmwoz_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline const Element& element(const gui::GuiState& s, const std::string& id) {
    static thread_local layout::Layout lay;
    lay = layout::current_layout(s);
    const Element* e = lay.find(id);
    if (!e) throw NoTargetError("test helper: no element " + id);
    return *e;
}

inline gui::GuiState click(const gui::GuiState& s, const std::string& id) {
    return gui::apply_operation(s, OperationInstruction::click(element(s, id).bbox, id));
}

inline gui::GuiState type(const gui::GuiState& s, const std::string& id, const std::string& value) {
    return gui::apply_operation(s, OperationInstruction::input(element(s, id).bbox, value, id));
}

/// The bundled sample corpus compiled once per process (no PNGs).
inline const dataset::Dataset& sample_dataset() {
    static TempDir dir("sample_corpus");
    static const dataset::Dataset data = [] {
        dataset::EmitSettings settings;
        settings.database = (source_dir() / "data/db").string();
        auto corpus = dataset::load_multiwoz(source_dir() / "data/sample_multiwoz");
        settings.dev_ids = corpus.dev_ids;
        settings.test_ids = corpus.test_ids;
        settings.out_of_scope = corpus.out_of_scope;
        dataset::compile_corpus(corpus, full_db(), dir.path(), settings);
        return dataset::load_dataset(dir.path());
    }();
    return data;
}

}  // namespace mmwoz::testing
