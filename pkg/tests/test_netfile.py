import pytest
from hypothesis import given
from hypothesis import strategies as st

from pimmap import LayerSpec, NetworkSpec, load_network, parse_network, render_network
from pimmap.netfile import NetworkFileError

from conftest import small_layers

VGG13_ROWS = [
    (224, 3, 64), (224, 64, 64), (112, 64, 128), (112, 128, 128), (56, 128, 256),
    (56, 256, 256), (28, 256, 512), (28, 512, 512), (14, 512, 512), (14, 512, 512),
]
RESNET18_ROWS = [(112, 7, 3, 64), (56, 3, 64, 64), (28, 3, 128, 128), (14, 3, 256, 256), (7, 3, 512, 512)]


def test_bundled_vgg13_matches_table(vgg13):
    assert vgg13.name == "vgg13"
    assert [(l.ifm_w, l.in_ch, l.out_ch) for l in vgg13.layers] == VGG13_ROWS
    assert all(l.ifm_h == l.ifm_w and l.k_w == l.k_h == 3 for l in vgg13.layers)


def test_bundled_resnet18_matches_table(resnet18):
    assert [(l.ifm_w, l.k_w, l.in_ch, l.out_ch) for l in resnet18.layers] == RESNET18_ROWS
    assert all(l.ifm_h == l.ifm_w and l.k_h == l.k_w for l in resnet18.layers)


def test_parse_minimal():
    net = parse_network("# hi\nnetwork tiny\n\nlayer name=a ifm_w=5 ifm_h=6 k_w=3 k_h=2 in_ch=1 out_ch=4  # trailing\n")
    assert net == NetworkSpec("tiny", (LayerSpec("a", 5, 6, 3, 2, 1, 4),))


@pytest.mark.parametrize(
    "text,line,message",
    [
        ("", None, "missing network"),
        ("network x\n", None, "no layers"),
        ("layer name=a\n", 1, "before network"),
        ("network x\nnetwork y\n", 2, "duplicate network"),
        ("network x\nconv name=a\n", 2, "unknown record"),
        ("network x\nlayer name=a ifm_w=5\n", 2, "missing field"),
        ("network x\nlayer name=a ifm_w=5 ifm_h=5 k_w=3 k_h=3 in_ch=1 out_ch=q\n", 2, "out_ch"),
        ("network x\nlayer name=a ifm_w=5 ifm_h=5 k_w=3 k_h=3 in_ch=1 out_ch=1 stride=2\n", 2, "unknown field 'stride'"),
        ("network x\nlayer name=a ifm_w=2 ifm_h=5 k_w=3 k_h=3 in_ch=1 out_ch=1\n", 2, "exceeds IFM"),
        ("network x\nlayer name=a ifm_w\n", 2, "key=value"),
    ],
)
def test_parse_errors(text, line, message):
    with pytest.raises(NetworkFileError, match=message) as info:
        parse_network(text, source="f.net")
    assert info.value.line == line


def test_duplicate_layer_names():
    text = "network x\n" + "layer name=a ifm_w=5 ifm_h=5 k_w=3 k_h=3 in_ch=1 out_ch=1\n" * 2
    with pytest.raises(NetworkFileError, match="duplicate layer"):
        parse_network(text)


def test_missing_file(tmp_path):
    with pytest.raises(NetworkFileError, match="cannot read"):
        load_network(tmp_path / "nope.net")


def test_load_from_path(tmp_path, resnet18):
    path = tmp_path / "r.net"
    path.write_text(render_network(resnet18))
    assert load_network(path) == resnet18


names = st.text(st.sampled_from("abcdefghijklmnopqrstuvwxyz0123456789_-."), min_size=1, max_size=8)


@given(names, st.lists(small_layers(max_ifm=300, max_k=11, max_ch=1024), min_size=1, max_size=6))
def test_round_trip(net_name, layers):
    layers = [LayerSpec(f"l{i}", *(getattr(l, f) for f in ("ifm_w", "ifm_h", "k_w", "k_h", "in_ch", "out_ch"))) for i, l in enumerate(layers)]
    net = NetworkSpec(net_name, tuple(layers))
    assert parse_network(render_network(net)) == net
