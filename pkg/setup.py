#!/usr/bin/env python3
"""
Setup script for spinopt
"""

import os
import sys
import subprocess

sys.path.append(os.path.dirname(os.path.abspath(__file__)))


def check_python_version():
    """Check if Python version is compatible"""
    if sys.version_info < (3, 8):
        print("❌ Python 3.8 or higher is required")
        return False
    print(f"✅ Python {sys.version_info.major}.{sys.version_info.minor} detected")
    return True


def check_dependencies():
    """Check if required packages are installed"""
    required_packages = {
        'numpy': 'numpy',
        'scipy': 'scipy',
        'pandas': 'pandas',
        'python-dotenv': 'dotenv',
    }

    missing_packages = []

    for package, module in required_packages.items():
        try:
            __import__(module)
            print(f"✅ {package}")
        except ImportError:
            print(f"❌ {package} - Missing")
            missing_packages.append(package)

    if missing_packages:
        print(f"\n📦 Installing missing packages: {', '.join(missing_packages)}")
        try:
            subprocess.check_call([sys.executable, '-m', 'pip', 'install'] + missing_packages)
            print("✅ All packages installed successfully")
        except subprocess.CalledProcessError:
            print("❌ Failed to install packages. Please run: pip install -r requirements.txt")
            return False

    return True


def check_environment_variables():
    """Report the optional SPINOPT_* settings"""
    optional_vars = [
        'SPINOPT_SEED',
        'SPINOPT_LOG_LEVEL',
        'SPINOPT_WORKERS',
        'SPINOPT_EIG_METHOD',
        'SPINOPT_OUTPUT_DIR',
    ]
    for var in optional_vars:
        value = os.getenv(var)
        if value:
            print(f"✅ {var}={value}")
        else:
            print(f"⚪ {var} - using default")


def check_output_dir():
    import config
    os.makedirs(config.OUTPUT_DIR, exist_ok=True)
    print(f"✅ Output directory: {config.OUTPUT_DIR}")


def check_systems():
    """Build every registered system once"""
    from systems.registry import SYSTEMS, build_system
    from utils.errors import SpinOptError

    ok = True
    for name in sorted(SYSTEMS):
        try:
            system = build_system(name)
            print(f"✅ {name}: drift {system.h_coeffs.tolist()}, Weyl orbit of {system.orbit.size} points")
        except SpinOptError as e:
            print(f"❌ {name}: {e.name}: {e}")
            ok = False
    return ok


def create_env_template():
    """Create a template .env file"""
    env_template = """# spinopt settings

# Seed for every sampler (decimal or 0x-prefixed)
SPINOPT_SEED=0xC0FFEE
SPINOPT_LOG_LEVEL=WARNING
SPINOPT_WORKERS=1
# lapack | jacobi
SPINOPT_EIG_METHOD=lapack
SPINOPT_OUTPUT_DIR=output
"""

    if not os.path.exists('.env'):
        with open('.env', 'w') as f:
            f.write(env_template)
        print("✅ Created .env template file")
    else:
        print("✅ .env file already exists")


def main():
    """Main setup function"""
    print("🌀 spinopt Setup")
    print("=" * 50)

    if not check_python_version():
        sys.exit(1)

    print("\n📦 Dependencies Check:")
    if not check_dependencies():
        sys.exit(1)

    print("\n🔧 Environment Setup:")
    create_env_template()
    check_environment_variables()
    check_output_dir()

    print("\n🧪 System Check:")
    if not check_systems():
        sys.exit(1)

    print("\n" + "=" * 50)
    print("🎉 Setup Complete!")
    print("\nNext steps:")
    print("1. Run the test scripts, e.g.: python test_timeopt.py")
    print("2. Try: python cli.py check-pair --n 3")
    print("\nFor more information, see README.md")


if __name__ == "__main__":
    if len(sys.argv) > 1:
        # Invoked by a build backend (pip/setuptools commands); metadata lives in pyproject.toml
        from setuptools import setup
        setup()
    else:
        main()
