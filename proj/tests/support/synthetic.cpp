#include "synthetic.hpp"

#include "world.hpp"

#include <algorithm>

namespace duet::testing {

namespace {

const std::vector<std::string> kZhWords = {"老虎", "狮子", "兔子", "狗", "猫", "熊猫", "大象", "猴子", "鸟", "小鸟", "动物园", "动物"};
const std::vector<std::string> kEnWords = {"zoo", "animal", "bird", "dog", "cat", "hot dog", "tiger", "lion", "rabbit", "bus", "park", "hat"};

const std::vector<std::string> kZhFiller = {"今天天气很好。", "他们一起走路。", "大家都笑了。", "我们去玩吧。", "太阳出来了。", "风吹过来，树叶沙沙响。"};
const std::vector<std::string> kEnFiller = {"They walk together.", "The sun is bright.", "Everyone smiles.", "It is a happy day.", "Wind moves the leaves."};

template <typename T>
const T& pick(std::mt19937& rng, const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

int roll(std::mt19937& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

std::string planted(std::mt19937& rng, Language lang, const std::string& w) {
    if (lang == Language::zh) {
        static const std::vector<std::string> shapes = {"看，{}在那里。", "一只{}跑过来。", "{}也想一起玩。"};
        auto s = pick(rng, shapes);
        return s.replace(s.find("{}"), 2, w);
    }
    static const std::vector<std::string> shapes = {"Look at the {}.", "A {} comes along.", "We see one {} here.",
                                                    "Hello, {}!"};
    auto s = pick(rng, shapes);
    return s.replace(s.find("{}"), 2, w);
}

std::vector<std::string> choose(std::mt19937& rng, const std::vector<std::string>& pool, int count) {
    auto copy = pool;
    std::shuffle(copy.begin(), copy.end(), rng);
    copy.resize(static_cast<std::size_t>(count));
    return copy;
}

}  // namespace

SyntheticStory synthetic_story(std::mt19937& rng) {
    SyntheticStory out;
    out.config = zoo_config();
    const int n = roll(rng, profile::kMinParagraphs, profile::kMaxParagraphs);
    const Language first = roll(rng, 0, 1) ? Language::zh : Language::en;
    out.config.first_paragraph_language = first;
    out.config.paragraph_count = n;
    const auto zh = choose(rng, kZhWords, roll(rng, 1, 5));
    const auto en = choose(rng, kEnWords, roll(rng, 1, 5));
    out.config.target_words = profile::make_target_words({{Language::zh, zh}, {Language::en, en}});

    std::vector<std::vector<std::string>> sentences(static_cast<std::size_t>(n));
    std::vector<int> of_lang[2];
    for (int i = 0; i < n; ++i) {
        const Language lang = i % 2 == 0 ? first : other_language(first);
        of_lang[lang == Language::zh ? 0 : 1].push_back(i);
        const int fillers = roll(rng, 1, 3);
        for (int k = 0; k < fillers; ++k) {
            sentences[static_cast<std::size_t>(i)].push_back(pick(rng, lang == Language::zh ? kZhFiller : kEnFiller));
        }
    }
    auto plant = [&](Language lang, const std::vector<std::string>& words) {
        const auto& targets = of_lang[lang == Language::zh ? 0 : 1];
        for (const auto& w : words) {
            const int times = roll(rng, 1, 3);
            for (int t = 0; t < times; ++t) {
                auto& list = sentences[static_cast<std::size_t>(pick(rng, targets))];
                const auto at = static_cast<std::ptrdiff_t>(roll(rng, 0, static_cast<int>(list.size())));
                list.insert(list.begin() + at, planted(rng, lang, w));
            }
        }
    };
    plant(Language::zh, zh);
    plant(Language::en, en);

    story::StoryFramework fw;
    fw.framework_id = "synthetic";
    for (int i = 0; i < n; ++i) {
        story::Paragraph p;
        p.index = i;
        p.language = i % 2 == 0 ? first : other_language(first);
        for (const auto& s : sentences[static_cast<std::size_t>(i)]) {
            if (!p.text.empty() && p.language == Language::en) p.text += ' ';
            p.text += s;
        }
        fw.paragraphs.push_back(std::move(p));
    }

    // Stage ranges: every stage gets one paragraph (when there are at least
    // five), the rest go to random stages, order preserved.
    const auto& stages = story::all_stages();
    std::vector<int> sizes;
    if (n >= static_cast<int>(stages.size())) {
        sizes.assign(stages.size(), 1);
        for (int extra = n - static_cast<int>(stages.size()); extra > 0; --extra) {
            ++sizes[static_cast<std::size_t>(roll(rng, 0, static_cast<int>(stages.size()) - 1))];
        }
    } else {
        sizes.assign(static_cast<std::size_t>(n), 1);
    }
    int at = 0;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        fw.narrative_stages.push_back({stages[s], at, at + sizes[s] - 1});
        at += sizes[s];
    }

    out.framework = story::confirm_framework(fw, out.config.target_words, first);
    return out;
}

}  // namespace duet::testing
