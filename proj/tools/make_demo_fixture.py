#!/usr/bin/env python3
"""Regenerates the bundled demo fixture (fixtures/).

The corpus is synthetic: every phrase occurs in a handful of well-formed
sentences, plus a few lines that each trip one rejection rule.
"""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

IDIOMS = [
    ("ada ekor", "ada maksud tersembunyi di balik perbuatan"),
    ("panjang tangan", "orang yang suka mencuri barang"),
    ("besar kepala", "orang yang sombong dan angkuh"),
    ("ringan tangan", "orang yang suka menolong sesama"),
    ("kambing hitam", "orang yang dipersalahkan tanpa bukti"),
    ("meja hijau", "sidang pengadilan resmi negara"),
]

FIXED = [
    ("padang pasir", "gurun luas yang penuh pasir"),
    ("rumah sakit", "gedung tempat merawat orang sakit"),
    ("air mata", "cairan yang keluar dari mata"),
    ("kereta api", "kendaraan panjang yang berjalan di rel"),
    ("orang tua", "ayah dan ibu dari anak"),
    ("kamar mandi", "ruang kecil untuk membersihkan badan"),
]

TEMPLATES = [
    "para warga desa percaya bahwa {p} selalu membawa cerita baru setiap pagi .",
    "sejak kecil dia sering mendengar kisah tentang {p} dari kakek di kampung .",
    "menurut berita kemarin {p} menjadi pembicaraan hangat para pedagang di pasar lama .",
    "banyak orang muda menulis puisi tentang {p} ketika musim hujan tiba lagi .",
    "guru sejarah menjelaskan arti {p} kepada murid baru dengan suara pelan sekali .",
    "tidak ada yang menyangka bahwa {p} akan mengubah hidup keluarga itu selamanya .",
]

FILLER = [
    "pagi itu pasar desa sudah ramai oleh pedagang sayur dan pembeli setia .",
    "anak anak sekolah berjalan kaki melewati sawah hijau menuju kelas mereka .",
    "hujan deras turun semalam sehingga jalan kampung menjadi licin dan berlumpur .",
    "nenek duduk di beranda sambil menganyam tikar pandan untuk cucu tercinta .",
    "kapal nelayan kembali ke dermaga membawa ikan segar hasil tangkapan semalam .",
]

# one line per rejection rule, each containing a phrase so it gets logged
REJECTS = [
    "ada ekor di sana .",                                            # too_short
    "menurut kabar terbaru panjang tangan itu membuat warga resah di kampung sébelah .",  # foreign_chars
    "besar kepala , selalu , menjadi , bahan , cerita , para , warga desa lama .",  # punctuation_heavy
    "semua orang tahu cerita lama tentang kambing hitam di desa itu berakhir dengan :",  # ends_with_colon
    "meja hijau dan kereta api dan rumah sakit dan padang pasir dan air mata dan orang tua dan kamar mandi bertemu di sana",  # segment_sequence (no terminal punctuation)
]


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)

    with open(OUT / "lexicon.jsonl", "w", encoding="utf-8") as f:
        for surface, definition in IDIOMS:
            f.write(json.dumps({"surface": surface, "kind": "idiom", "definition": definition}) + "\n")
        for surface, definition in FIXED:
            f.write(json.dumps({"surface": surface, "kind": "fixed", "definition": definition}) + "\n")

    lines = []
    phrases = [s for s, _ in IDIOMS + FIXED]
    for i, phrase in enumerate(phrases):
        for j in range(4):
            lines.append(TEMPLATES[(i + j) % len(TEMPLATES)].format(p=phrase))
        lines.append(FILLER[i % len(FILLER)])
    # definition vocabulary must occur in the corpus or Def/Lit reps are empty
    for _, definition in IDIOMS + FIXED:
        lines.append(f"dalam kamus lama arti ungkapan itu adalah {definition} menurut ahli bahasa .")
    lines.extend(REJECTS)
    with open(OUT / "corpus.txt", "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")

    config = {
        "lexicon": "lexicon.jsonl",
        "corpus": "corpus.txt",
        "workdir": "../work",
        "seed": 7,
        "mine": {"band": [3, 10], "balance": True},
        "embed": {"dim": 16, "window": 5, "negatives": 5, "epochs": 10, "min_count": 1},
        "generate": {"pools": ["idioms", "fixed", "combined"], "split": [0.7, 0.2, 0.1]},
        "evaluate": {
            "scheme": "holdout",
            "epochs": 3,
            "batch_size": 8,
            "learning_rate": 0.05,
            "dropout": 0.1,
            "grid": [
                {"pool": "combined", "idiom_rep": "def+random", "fixed_rep": "random"},
                {"pool": "idioms", "idiom_rep": "def"},
            ],
        },
    }
    with open(OUT / "config.json", "w", encoding="utf-8") as f:
        json.dump(config, f, indent=2)
        f.write("\n")

    print(f"wrote {OUT}/lexicon.jsonl, corpus.txt ({len(lines)} lines), config.json")


if __name__ == "__main__":
    main()
