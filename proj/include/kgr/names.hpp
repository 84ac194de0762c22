// SPDX-License-Identifier: Apache-2.0
//
// Split-scoped synthetic name vocabularies. First names and object
// adjectives are partitioned across the three split pools so full names and
// object phrases can never collide between splits.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "kgr/rng.hpp"

namespace kgr {

namespace names {

inline const std::vector<std::string>& first_names() {
    static const std::vector<std::string> v = {
        "Karen",    "Charity",  "Dustin",   "Esther",   "Eric",     "Agnes",
        "Jacqueline", "Andrea",  "Edward",   "Cyril",    "Bella",    "Andrew",
        "Denise",   "Bonnie",   "Pauline",  "Phyllis",  "Antonio",  "Arthur",
        "Mason",    "Helen",    "Amber",    "Ariana",   "Connor",   "Hope",
        "Asher",    "Anita",    "Oscar",    "Lena",     "Liam",     "Jean",
        "Annika",   "Oliver",   "Kimberly", "Anthony",  "Jared",    "Emma",
        "Dorothy",  "Julia",    "Marcus",   "Sylvia",   "Walter",   "Ingrid",
        "Felix",    "Clara",    "Hugo",     "Miriam",   "Ralph",    "Nina",
        "Victor",   "Greta",    "Simon",    "Petra",    "Nathan",   "Iris",
        "Gideon",   "Maude",    "Ezra",     "Lottie",   "Rupert",   "Sadie",
        "Ambrose",  "Thea",     "Clifford", "Elsa",     "Martin",   "Opal",
        "Leonard",  "Vera",     "Cedric",   "Mabel",    "Horace",   "Flora",
        "Stanley",  "Edith",    "Rodney",   "Hazel",    "Bernard",  "June",
        "Wallace",  "Cora",     "Alfred",   "Pearl",    "Norman",   "Ivy",
        "Eugene",   "Ruth",     "Harvey",   "Stella",   "Chester",  "Olive",
        "Clarence", "Faye",     "Vernon",   "Daphne",   "Gilbert",  "Lucille",
    };
    return v;
}

inline const std::vector<std::string>& middle_names() {
    static const std::vector<std::string> v = {
        "Baylor",   "Lark",     "Keith",    "Delvin",   "Aston",    "Drummond",
        "Coby",     "Bryson",   "Amias",    "Aether",   "Essex",    "Hanley",
        "Ansel",    "Beckett",  "Euan",     "Beck",     "Brolin",   "Kent",
        "Rufus",    "Blair",    "Reef",     "Arbor",    "Baden",    "Fischer",
        "Cole",     "Rayner",   "Ciel",     "Carlyle",  "Digby",    "Ridge",
        "Ivar",     "Chandos",  "Bryden",   "Remington", "Adair",   "Lester",
        "Thane",    "Quill",    "Marsh",    "Holt",     "Pax",      "Wren",
        "Sorrel",   "Vance",    "Ellery",   "Fenn",     "Gray",     "Hollis",
        "Idris",    "Jory",     "Kit",      "Lowell",   "Merritt",  "North",
        "Orion",    "Pryor",    "Quincy",   "Rane",     "Sable",    "Teague",
        "Usher",    "Vaughn",   "Winslow",  "Yates",
    };
    return v;
}

inline const std::vector<std::string>& last_names() {
    static const std::vector<std::string> v = {
        "Sawyer",      "Amberley",   "Ravenscroft", "Murdoch",    "Fairbanks",
        "Fielding",    "Pettigrew",  "McCaffrey",   "Clements",   "Devonshire",
        "Ainsworth",   "Northcott",  "Glendale",    "Barncastle", "Brookhaven",
        "Ames",        "Harmon",     "Bellingham",  "Houghton",   "Oaksworth",
        "Nelson",      "Wolcott",    "Paddington",  "Bellamy",    "Clarkson",
        "Frazier",     "Stanford",   "Merriweather", "Overton",   "Grayson",
        "Fitzgerald",  "Emerson",    "Berwick",     "Cromwell",   "Blanchard",
        "Burleigh",    "Ashdown",    "Birchwood",   "Caldwell",   "Draper",
        "Eastgate",    "Farrow",     "Gable",       "Hartwell",   "Ironside",
        "Jessop",      "Kingsley",   "Larkspur",    "Mansfield",  "Netherwood",
        "Oakhurst",    "Pemberton",  "Quimby",      "Rosewood",   "Silverton",
        "Thackeray",   "Underhill",  "Vickers",     "Wexford",    "Yardley",
        "Abernathy",   "Bickford",   "Colthurst",   "Dunmore",    "Ellsworth",
        "Fenwick",     "Garrick",    "Hawthorne",   "Iversen",    "Josling",
        "Kestrel",     "Lockridge",  "Moorfield",   "Norbury",    "Ormond",
        "Prescott",    "Quarry",     "Redfern",     "Stanhope",   "Tillman",
    };
    return v;
}

inline const std::vector<std::string>& object_adjectives() {
    static const std::vector<std::string> v = {
        "ivory",   "ebony",   "copper",  "leather", "silver",  "golden",
        "marble",  "oaken",   "velvet",  "crimson", "amber",   "jade",
        "bronze",  "pewter",  "scarlet", "walnut",  "crystal", "obsidian",
        "cobalt",  "emerald", "maple",   "brass",   "indigo",  "porcelain",
        "granite", "sapphire", "cedar",  "tin",     "violet",  "onyx",
        "birch",   "opaline", "russet",  "willow",  "umber",   "quartz",
    };
    return v;
}

inline const std::vector<std::string>& object_nouns() {
    static const std::vector<std::string> v = {
        "chess piece", "cane",        "coin",        "bag",        "lantern",
        "violin",      "telescope",   "locket",      "compass",    "vase",
        "quill",       "goblet",      "tapestry",    "snuffbox",   "music box",
        "pocket watch", "figurine",   "dagger",      "atlas",      "hourglass",
        "mirror",      "candlestick", "chalice",     "flute",      "inkwell",
        "medallion",   "paperweight", "scroll",      "sextant",    "thimble",
        "teapot",      "brooch",      "gavel",       "astrolabe",  "carving",
        "spyglass",    "bell",        "chessboard",  "amulet",     "decanter",
    };
    return v;
}

}  // namespace names

// Pools 0, 1, 2 correspond to the pretrain, RL, and eval splits.
inline constexpr int kNamePoolCount = 3;

inline int name_pool_from_label(const std::string& label) {
    if (label == "pretrain") return 0;
    if (label == "rl") return 1;
    if (label == "eval") return 2;
    throw std::invalid_argument("unknown name pool label: " + label);
}

inline const char* name_pool_label(int pool) {
    switch (pool) {
        case 0: return "pretrain";
        case 1: return "rl";
        case 2: return "eval";
    }
    throw std::invalid_argument("name pool index out of range");
}

// Samples unique person full names and object phrases from one split pool.
class NamePool {
public:
    explicit NamePool(int pool) : pool_(pool) {
        if (pool < 0 || pool >= kNamePoolCount)
            throw std::invalid_argument("name pool index out of range");
    }

    int pool() const { return pool_; }

    // A full name whose first name belongs to this pool's partition and that
    // does not occur in `used`. The name is added to `used`.
    std::string sample_person(Rng& rng, std::unordered_set<std::string>& used) const {
        const auto& firsts = names::first_names();
        const auto& mids = names::middle_names();
        const auto& lasts = names::last_names();
        const std::size_t share = firsts.size() / kNamePoolCount;
        for (int attempt = 0; attempt < 4096; ++attempt) {
            const auto& first = firsts[pool_ * share + rng.below(share)];
            std::string name = first;
            name += ' ';
            name += mids[rng.below(mids.size())];
            name += ' ';
            name += lasts[rng.below(lasts.size())];
            if (used.insert(name).second) return name;
        }
        throw std::runtime_error("person name pool exhausted");
    }

    std::string sample_object(Rng& rng, std::unordered_set<std::string>& used) const {
        const auto& adjs = names::object_adjectives();
        const auto& nouns = names::object_nouns();
        const std::size_t share = adjs.size() / kNamePoolCount;
        for (int attempt = 0; attempt < 4096; ++attempt) {
            std::string name = adjs[pool_ * share + rng.below(share)];
            name += ' ';
            name += nouns[rng.below(nouns.size())];
            if (used.insert(name).second) return name;
        }
        throw std::runtime_error("object name pool exhausted");
    }

private:
    int pool_;
};

}  // namespace kgr
