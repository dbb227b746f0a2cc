#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
环境检查脚本 - 检查依赖、素数池和模运算是否可用
"""

import os
import sys

# 设置输出编码为UTF-8
if sys.platform == 'win32':
    import io
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding='utf-8')
    sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding='utf-8')

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))


def check_python_version():
    """检查Python版本"""
    version = sys.version_info
    print(f"Python版本: {version.major}.{version.minor}.{version.micro}")
    if (version.major, version.minor) >= (3, 9):
        print("✓ Python版本符合要求 (>=3.9)")
        return True
    print("✗ Python版本过低，需要3.9或更高版本")
    return False


def check_modules():
    """检查必需的Python模块"""
    required_modules = {
        'numpy': '模运算向量化、NTT',
        'sympy': '素数判定、符号校验',
        'json': '配置与证书',
        'logging': '日志记录',
        'fractions': '有理数',
        'concurrent.futures': '并行猜测',
    }

    all_ok = True
    print("\n检查Python模块:")
    for module, desc in required_modules.items():
        try:
            __import__(module)
            print(f"✓ {module:20s} - {desc}")
        except ImportError:
            print(f"✗ {module:20s} - {desc} [缺失]")
            all_ok = False

    return all_ok


def check_prime_pool():
    """检查素数池"""
    print("\n检查素数池:")
    try:
        from exactarith import load_primes
        primes = load_primes(count=4)
        source = os.environ.get('WALKPROVE_PRIMES') or 'NTT 素数池'
        print(f"来源: {source}")
        for p in primes:
            print(f"  {p}  ({p.bit_length()} 位)")
        print("✓ 素数可用")
        return True
    except Exception as e:
        print(f"✗ 读取素数失败: {e}")
        return False


def test_modular_product():
    """用小例子对比 NTT 乘法与逐项乘法"""
    print("\n测试模乘法:")
    try:
        import numpy as np
        from exactarith import convolve_mod, load_primes

        p = load_primes(count=1)[0]
        rng = np.random.default_rng(0)
        a = rng.integers(0, p, 300, dtype=np.int64)
        b = rng.integers(0, p, 300, dtype=np.int64)
        fast = convolve_mod(a, b, p)
        slow = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a.tolist()):
            for j, y in enumerate(b.tolist()):
                slow[i + j] = (slow[i + j] + x * y) % p
        if fast.tolist() == slow:
            print(f"✓ 300 项乘积一致 (p = {p})")
            return True
        print("✗ NTT 乘积与逐项乘积不一致")
        return False
    except Exception as e:
        print(f"✗ 模乘法测试失败: {e}")
        return False


def main():
    """主函数"""
    print("=" * 60)
    print("格路证明工具 - 环境检查")
    print("=" * 60)

    results = []

    results.append(("Python版本", check_python_version()))
    results.append(("Python模块", check_modules()))
    results.append(("素数池", check_prime_pool()))
    results.append(("模乘法", test_modular_product()))

    print("\n" + "=" * 60)
    print("检查结果汇总:")
    print("=" * 60)

    for name, result in results:
        status = "✓ 通过" if result else "✗ 失败"
        print(f"{name:20s}: {status}")

    all_passed = all(result for _, result in results)

    print("\n" + "=" * 60)
    if all_passed:
        print("✓ 所有检查通过，环境准备就绪！")
        print("\n下一步：运行 python src/walkprove.py count --steps E,W,NE,SW --n 8 --end 0,0")
    else:
        print("✗ 部分检查未通过，请按照上述提示解决问题")
    print("=" * 60)
    return all_passed


if __name__ == '__main__':
    sys.exit(0 if main() else 1)
