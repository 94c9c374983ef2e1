#include "pathrel/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "pathrel/tensor.hpp"

namespace pathrel {

namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

std::int64_t RelationDataset::label_index(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return static_cast<std::int64_t>(i);
    }
    return -1;
}

RelationDataset load_split(const std::string& path, const std::vector<std::string>& labels,
                           const std::string& split, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset split: " + path);

    RelationDataset ds;
    ds.name = name;
    ds.labels = labels;
    ds.split = split;

    std::set<std::pair<std::string, std::string>> seen;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t t1 = line.find('\t');
        const std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) {
            throw DataError(path + " line " + std::to_string(line_no) + ": expected 3 columns");
        }
        RelationInstance inst;
        inst.w1 = lowercase(line.substr(0, t1));
        inst.w2 = lowercase(line.substr(t1 + 1, t2 - t1 - 1));
        const std::string rel = line.substr(t2 + 1);
        inst.label = ds.label_index(rel);
        if (inst.label < 0) {
            throw DataError(path + " line " + std::to_string(line_no) +
                            ": unknown relation label '" + rel + "'");
        }
        if (!seen.insert({inst.w1, inst.w2}).second) {
            throw DataError(path + " line " + std::to_string(line_no) + ": duplicate pair (" +
                            inst.w1 + ", " + inst.w2 + ")");
        }
        ds.instances.push_back(std::move(inst));
    }
    if (ds.instances.empty()) throw DataError("dataset split is empty: " + path);
    return ds;
}

DatasetSplits load_dataset_dir(const std::string& dir, const std::string& name) {
    std::vector<std::string> labels;
    {
        std::ifstream rels(dir + "/relations.txt");
        if (!rels) throw DataError("cannot open " + dir + "/relations.txt");
        std::string line;
        while (std::getline(rels, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) labels.push_back(line);
        }
    }
    if (labels.empty()) throw DataError("no relation labels declared in " + dir);

    DatasetSplits splits;
    splits.labels = labels;
    splits.train = load_split(dir + "/train.tsv", labels, "train", name);
    splits.val = load_split(dir + "/val.tsv", labels, "val", name);
    splits.test = load_split(dir + "/test.tsv", labels, "test", name);
    return splits;
}

}  // namespace pathrel
