from pathlib import Path

import pytest

from bnconcur import bn, encodings, mpmv, rpn

MODELS = Path(__file__).resolve().parent.parent / "models"


@pytest.fixture
def models():
    return MODELS


@pytest.fixture
def ex3():
    return bn.load_bn(MODELS / "EX3.bn")


@pytest.fixture
def ex2():
    return bn.load_bn(MODELS / "EX2.bn")


@pytest.fixture
def net4():
    return rpn.load_net(MODELS / "NET4.rpn.json")


@pytest.fixture
def single():
    return rpn.load_net(MODELS / "single.rpn.json")


@pytest.fixture
def neg3():
    return encodings.bn_to_rpn(bn.load_bn(MODELS / "NEG3.bn"), (1, 1, 1))


@pytest.fixture
def pos2():
    return encodings.bn_to_rpn(bn.load_bn(MODELS / "POS2.bn"), (0, 1))


@pytest.fixture
def ex1_mv():
    return mpmv.load_mv(MODELS / "ex1.mv.json")


@pytest.fixture
def ex2_mv():
    return mpmv.load_mv(MODELS / "ex2.mv.json")
